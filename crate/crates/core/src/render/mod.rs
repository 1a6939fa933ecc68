//! Deterministic layout of decision maps and export to SVG and draw.io.

mod config;
mod drawio;
mod layout;
mod svg;

use std::fmt;
use std::str::FromStr;

pub use config::{Colors, LayoutConfig, RenderConfig, RenderConfigError, DEFAULT_RENDER_CONFIG};
pub use drawio::export_drawio;
pub use layout::{layout_dm, Band, BandKind, EdgeRoute, Layout, NodeBox, NodeKind, Point, Rect};
pub use svg::render_svg;

use crate::model::{DecisionMap, EffectType};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Svg,
    Drawio,
    Json,
}

impl RenderFormat {
    pub fn content_type(self) -> &'static str {
        match self {
            RenderFormat::Svg => "image/svg+xml",
            RenderFormat::Drawio => "application/xml",
            RenderFormat::Json => "application/json",
        }
    }
}

impl fmt::Display for RenderFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RenderFormat::Svg => "svg",
            RenderFormat::Drawio => "drawio",
            RenderFormat::Json => "json",
        })
    }
}

impl FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "svg" => Ok(RenderFormat::Svg),
            "drawio" => Ok(RenderFormat::Drawio),
            "json" => Ok(RenderFormat::Json),
            other => Err(format!("unknown render format `{other}` (expected svg, drawio or json)")),
        }
    }
}

/// Lays out and renders in one step. `json` emits the layout itself.
pub fn render(dm: &DecisionMap, format: RenderFormat, config: &RenderConfig) -> String {
    let layout = layout_dm(dm, &config.layout);
    match format {
        RenderFormat::Svg => render_svg(&layout, dm, config),
        RenderFormat::Drawio => export_drawio(&layout, dm, config),
        RenderFormat::Json => {
            let mut s = serde_json::to_string_pretty(&layout).expect("layout serializes");
            s.push('\n');
            s
        }
    }
}

pub(crate) fn glyph(t: EffectType) -> &'static str {
    match t {
        EffectType::Positive => "+",
        EffectType::Negative => "\u{2212}",
        EffectType::Undecided => "?",
    }
}

/// Edge ids join source and target with a dot. Targets never contain a
/// dot, so the id splits back at its last dot.
pub(crate) fn edge_dom_id(source: &str, target: &str) -> String {
    format!("edge-{source}.{target}")
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            c if (c as u32) < 0x20 && c != '\t' => out.push('\u{FFFD}'),
            c => out.push(c),
        }
    }
    out
}

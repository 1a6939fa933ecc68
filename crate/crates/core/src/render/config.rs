use serde::{Deserialize, Serialize};

use crate::model::Dimension;

pub const DEFAULT_RENDER_CONFIG: &str = include_str!("../../config/render.toml");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutConfig {
    pub margin: i32,
    pub header: i32,
    pub band_width: i32,
    /// Gap between neighbouring bands, where edges run vertically.
    pub channel: i32,
    pub node_width: i32,
    pub node_height: i32,
    pub row_gap: i32,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        Self {
            margin: 20,
            header: 40,
            band_width: 220,
            channel: 60,
            node_width: 180,
            node_height: 48,
            row_gap: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Colors {
    pub technical: String,
    pub environmental: String,
    pub economic: String,
    pub social: String,
    pub feature: String,
    pub variant: String,
    pub band: String,
    pub stroke: String,
}

impl Default for Colors {
    fn default() -> Self {
        Self {
            technical: "#D4E1F5".into(),
            environmental: "#D5E8D4".into(),
            economic: "#F8CECC".into(),
            social: "#FFFF99".into(),
            feature: "#FFFFFF".into(),
            variant: "#F5F5F5".into(),
            band: "#FAFAFA".into(),
            stroke: "#333333".into(),
        }
    }
}

impl Colors {
    pub fn dimension(&self, d: Dimension) -> &str {
        match d {
            Dimension::Technical => &self.technical,
            Dimension::Environmental => &self.environmental,
            Dimension::Economic => &self.economic,
            Dimension::Social => &self.social,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderConfig {
    pub layout: LayoutConfig,
    pub colors: Colors,
}

#[derive(Debug, thiserror::Error)]
pub enum RenderConfigError {
    #[error("invalid render config: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("invalid render config: `{0}` is out of range")]
    OutOfRange(&'static str),
}

impl RenderConfig {
    pub fn from_toml(text: &str) -> Result<Self, RenderConfigError> {
        let c: Self = toml::from_str(text)?;
        let l = &c.layout;
        for (name, v) in [
            ("band_width", l.band_width),
            ("node_width", l.node_width),
            ("node_height", l.node_height),
        ] {
            if v <= 0 {
                return Err(RenderConfigError::OutOfRange(name));
            }
        }
        for (name, v) in [("margin", l.margin), ("header", l.header), ("channel", l.channel), ("row_gap", l.row_gap)] {
            if v < 0 {
                return Err(RenderConfigError::OutOfRange(name));
            }
        }
        Ok(c)
    }
}

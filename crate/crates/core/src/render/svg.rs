use std::fmt::Write;

use super::config::RenderConfig;
use super::layout::{Layout, NodeKind};
use super::{edge_dom_id, escape, glyph};
use crate::model::{DecisionMap, EffectType};

/// SVG 1.1 document for a laid-out map. Every effect becomes one
/// `path.effect`; every feature, variant and concern one `g.node`.
pub fn render_svg(layout: &Layout, dm: &DecisionMap, config: &RenderConfig) -> String {
    let c = &config.colors;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = layout.width,
        h = layout.height
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&format!("{} ({})", dm.title, dm.system_name)));
    let _ = writeln!(
        s,
        r#"<defs><marker id="arrowhead" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="8" markerHeight="8" orient="auto"><polygon points="0,0 10,5 0,10" fill="{}"/></marker></defs>"#,
        c.stroke
    );

    s.push_str("<g class=\"bands\">\n");
    for b in &layout.bands {
        let f = b.frame;
        let _ = writeln!(
            s,
            r#"<g class="band" id="band-{name}"><rect x="{x}" y="{y}" width="{w}" height="{h}" fill="{fill}" stroke="{stroke}" stroke-dasharray="2,2"/><text class="band-title" x="{tx}" y="{ty}" text-anchor="middle" font-weight="bold">{title}</text></g>"#,
            name = b.kind.name(),
            x = f.x,
            y = f.y,
            w = f.w,
            h = f.h,
            fill = c.band,
            stroke = c.stroke,
            tx = f.x + f.w / 2,
            ty = f.y + 20,
            title = b.kind.title(),
        );
    }
    s.push_str("</g>\n");

    s.push_str("<g class=\"nodes\">\n");
    for n in &layout.nodes {
        let r = n.rect;
        let (class, fill, radius) = match n.kind {
            NodeKind::Feature => ("feature", c.feature.as_str(), 0),
            NodeKind::Variant => ("variant", c.variant.as_str(), 0),
            NodeKind::Concern => ("concern", n.dimension.map_or(c.feature.as_str(), |d| c.dimension(d)), 12),
        };
        let dim = n.dimension.map(|d| format!(r#" data-dimension="{d}""#)).unwrap_or_default();
        let _ = writeln!(
            s,
            r#"<g class="node {class}" id="node-{id}"{dim}><rect x="{x}" y="{y}" width="{w}" height="{h}" rx="{radius}" fill="{fill}" stroke="{stroke}"/><text x="{tx}" y="{ty}" text-anchor="middle" dominant-baseline="middle">{label}</text></g>"#,
            id = escape(&n.id),
            x = r.x,
            y = r.y,
            w = r.w,
            h = r.h,
            stroke = c.stroke,
            tx = r.x + r.w / 2,
            ty = r.center_y(),
            label = escape(&n.label),
        );
    }
    s.push_str("</g>\n");

    s.push_str("<g class=\"edges\">\n");
    for e in &layout.edges {
        let d: Vec<String> = e
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| format!("{}{},{}", if i == 0 { "M" } else { "L" }, p.x, p.y))
            .collect();
        let dash = if e.effect_type == EffectType::Undecided {
            r#" stroke-dasharray="6,4""#
        } else {
            ""
        };
        let a = e.anchor();
        let _ = write!(
            s,
            r#"<g class="edge" id="{id}" data-source="{src}" data-target="{tgt}"><path class="effect {ty}" d="{d}" fill="none" stroke="{stroke}"{dash} marker-end="url(#arrowhead)"/><text class="glyph" x="{gx}" y="{gy}" text-anchor="middle">{glyph}</text>"#,
            id = escape(&edge_dom_id(&e.source, &e.target)),
            src = escape(&e.source),
            tgt = escape(&e.target),
            ty = e.effect_type,
            d = d.join(" "),
            stroke = c.stroke,
            gx = a.x + 8,
            gy = a.y - 4,
            glyph = glyph(e.effect_type),
        );
        if let Some(label) = &e.label {
            let _ = write!(
                s,
                r#"<text class="impact-label" x="{}" y="{}" font-style="italic">{}</text>"#,
                a.x + 8,
                a.y + 14,
                escape(label)
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</g>\n</svg>\n");
    s
}

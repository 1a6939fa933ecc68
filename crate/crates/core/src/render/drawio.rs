use std::fmt::Write;

use super::config::RenderConfig;
use super::layout::{Layout, NodeKind};
use super::{edge_dom_id, escape, glyph};
use crate::model::{DecisionMap, EffectType};

/// diagrams.net document (`mxfile` with one `mxGraphModel`). Cell ids derive
/// from model ids: `band-<name>`, `node-<id>`, `edge-<source>.<target>`.
pub fn export_drawio(layout: &Layout, dm: &DecisionMap, config: &RenderConfig) -> String {
    let c = &config.colors;
    let mut s = String::new();
    s.push_str("<mxfile host=\"saf\">\n");
    let _ = writeln!(
        s,
        r#"<diagram id="dm-{}" name="{}">"#,
        escape(dm.id.as_str()),
        escape(&dm.title)
    );
    let _ = writeln!(
        s,
        r#"<mxGraphModel grid="1" gridSize="10" page="0" pageWidth="{}" pageHeight="{}">"#,
        layout.width, layout.height
    );
    s.push_str("<root>\n<mxCell id=\"0\"/>\n<mxCell id=\"1\" parent=\"0\"/>\n");

    let geometry = |s: &mut String, x: i32, y: i32, w: i32, h: i32| {
        let _ = write!(s, r#"<mxGeometry x="{x}" y="{y}" width="{w}" height="{h}" as="geometry"/>"#);
    };

    for b in &layout.bands {
        let f = b.frame;
        let _ = write!(
            s,
            r#"<mxCell id="band-{}" value="{}" style="swimlane;startSize=30;fillColor={};dashed=1;" vertex="1" parent="1">"#,
            b.kind.name(),
            b.kind.title(),
            c.band
        );
        geometry(&mut s, f.x, f.y, f.w, f.h);
        s.push_str("</mxCell>\n");
    }

    for n in &layout.nodes {
        let r = n.rect;
        let style = match n.kind {
            NodeKind::Feature => format!("shape=rectangle;whiteSpace=wrap;html=1;fillColor={};", c.feature),
            NodeKind::Variant => format!("shape=rectangle;whiteSpace=wrap;html=1;dashed=1;fillColor={};", c.variant),
            NodeKind::Concern => format!(
                "rounded=1;whiteSpace=wrap;html=1;fillColor={};",
                n.dimension.map_or(c.feature.as_str(), |d| c.dimension(d))
            ),
        };
        let _ = write!(
            s,
            r#"<mxCell id="node-{}" value="{}" style="{}" vertex="1" parent="1">"#,
            escape(&n.id),
            escape(&n.label),
            style
        );
        geometry(&mut s, r.x, r.y, r.w, r.h);
        s.push_str("</mxCell>\n");
    }

    for e in &layout.edges {
        let dashed = if e.effect_type == EffectType::Undecided { "dashed=1;" } else { "" };
        let value = match &e.label {
            Some(l) => format!("{} {}", glyph(e.effect_type), l),
            None => glyph(e.effect_type).to_string(),
        };
        let _ = write!(
            s,
            r#"<mxCell id="{}" value="{}" style="edgeStyle=orthogonalEdgeStyle;rounded=0;html=1;endArrow=block;{}" edge="1" parent="1" source="node-{}" target="node-{}"><mxGeometry relative="1" as="geometry"><Array as="points">"#,
            escape(&edge_dom_id(&e.source, &e.target)),
            escape(&value),
            dashed,
            escape(&e.source),
            escape(&e.target),
        );
        for p in &e.points[1..e.points.len() - 1] {
            let _ = write!(s, r#"<mxPoint x="{}" y="{}"/>"#, p.x, p.y);
        }
        s.push_str("</Array></mxGeometry></mxCell>\n");
    }
    s.push_str("</root>\n</mxGraphModel>\n</diagram>\n</mxfile>\n");
    s
}

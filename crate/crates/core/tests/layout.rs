mod support;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use saf_core::model::DecisionMap;
use saf_core::render::{layout_dm, render, BandKind, LayoutConfig, NodeKind, RenderConfig, RenderFormat};

fn shuffled(dm: &DecisionMap, rng: &mut rand::rngs::StdRng) -> DecisionMap {
    let mut out = dm.clone();
    out.concerns.shuffle(rng);
    out.features.shuffle(rng);
    for f in &mut out.features {
        f.variants.shuffle(rng);
        f.realized_by.shuffle(rng);
    }
    out.effects.shuffle(rng);
    out.goals.shuffle(rng);
    out
}

fn edge_ids(xml: &str, tag: &str) -> BTreeMap<String, usize> {
    let doc = roxmltree::Document::parse(xml).unwrap();
    let mut out = BTreeMap::new();
    for n in doc.descendants().filter(|n| n.has_tag_name(tag)) {
        if let Some(id) = n.attribute("id").filter(|id| id.starts_with("edge-")) {
            *out.entry(id.to_string()).or_insert(0) += 1;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn nodes_sit_inside_their_band_without_overlap(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let dm = support::gen_dm(&mut rng);
        let layout = layout_dm(&dm, &LayoutConfig::default());
        prop_assert_eq!(layout.nodes.len(), dm.concerns.len() + dm.features.iter().map(|f| 1 + f.variants.len()).sum::<usize>());
        for n in &layout.nodes {
            let band = &layout.bands[n.band];
            let f = band.frame;
            prop_assert!(f.x <= n.rect.x && n.rect.right() <= f.right() && f.y <= n.rect.y && n.rect.bottom() <= f.bottom(),
                "{} outside band {:?}", n.id, band.kind);
            match n.kind {
                NodeKind::Concern => {
                    let c = dm.concern(&n.id).unwrap();
                    prop_assert_eq!(band.kind, BandKind::Impact(c.impact));
                }
                NodeKind::Feature | NodeKind::Variant => prop_assert_eq!(band.kind, BandKind::Features),
            }
            prop_assert!(n.rect.right() <= layout.width && n.rect.bottom() <= layout.height);
        }
        for (i, a) in layout.nodes.iter().enumerate() {
            for b in &layout.nodes[i + 1..] {
                prop_assert!(!a.rect.overlaps(&b.rect), "{} overlaps {}", a.id, b.id);
            }
        }
        for w in layout.bands.windows(2) {
            prop_assert!(w[0].frame.right() < w[1].frame.x);
        }
    }

    #[test]
    fn edges_are_orthogonal_and_touch_their_nodes(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let dm = support::gen_dm(&mut rng);
        let layout = layout_dm(&dm, &LayoutConfig::default());
        prop_assert_eq!(layout.edges.len(), dm.effects.len());
        for e in &layout.edges {
            for w in e.points.windows(2) {
                prop_assert!(w[0].x == w[1].x || w[0].y == w[1].y);
            }
            let s = layout.node(&e.source).unwrap().rect;
            let t = layout.node(&e.target).unwrap().rect;
            let first = e.points[0];
            let last = *e.points.last().unwrap();
            prop_assert!(first.x == s.right() && s.y <= first.y && first.y <= s.bottom());
            prop_assert!((last.x == t.x || last.x == t.right()) && t.y <= last.y && last.y <= t.bottom());
        }
    }

    #[test]
    fn layout_ignores_declaration_order(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let dm = support::gen_dm(&mut rng);
        let other = shuffled(&dm, &mut rng);
        let config = RenderConfig::default();
        prop_assert_eq!(layout_dm(&dm, &config.layout), layout_dm(&other, &config.layout));
        for format in [RenderFormat::Svg, RenderFormat::Drawio, RenderFormat::Json] {
            prop_assert_eq!(render(&dm, format, &config), render(&other, format, &config));
        }
    }

    #[test]
    fn every_effect_is_drawn_exactly_once(seed in any::<u64>()) {
        let mut rng = support::rng(seed);
        let dm = support::gen_dm(&mut rng);
        let config = RenderConfig::default();
        let svg = render(&dm, RenderFormat::Svg, &config);
        let drawio = render(&dm, RenderFormat::Drawio, &config);
        let expected: BTreeMap<String, usize> = dm
            .effects
            .iter()
            .map(|e| (format!("edge-{}.{}", e.source, e.target), 1))
            .collect();
        prop_assert_eq!(edge_ids(&svg, "g"), expected.clone());
        prop_assert_eq!(edge_ids(&drawio, "mxCell"), expected);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let paths = doc
            .descendants()
            .filter(|n| n.has_tag_name("path") && n.attribute("class").is_some_and(|c| c.starts_with("effect ")))
            .count();
        prop_assert_eq!(paths, dm.effects.len());
        let glyphs = doc.descendants().filter(|n| n.attribute("class") == Some("glyph")).count();
        prop_assert_eq!(glyphs, dm.effects.len());
    }
}

#[test]
fn custom_config_changes_geometry_not_structure() {
    let mut rng = support::rng(7);
    let dm = support::gen_dm(&mut rng);
    let text = "[layout]\nband_width = 300\nnode_width = 400\n[colors]\ntechnical = \"#000000\"\n";
    let config = RenderConfig::from_toml(text).unwrap();
    let a = layout_dm(&dm, &LayoutConfig::default());
    let b = layout_dm(&dm, &config.layout);
    assert_eq!(a.nodes.len(), b.nodes.len());
    assert!(b.nodes.iter().all(|n| n.rect.w == 300));
    assert!(b.width > a.width);
    assert!(RenderConfig::from_toml("[layout]\nmargin = -1\n").is_err());
    assert!(RenderConfig::from_toml("[layout]\nbogus = 1\n").is_err());
}

//! Banded grid layout: features on the left, then one band per impact level.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::LayoutConfig;
use crate::model::{canonicalize, DecisionMap, Dimension, EffectType, ImpactLevel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandKind {
    Features,
    Impact(ImpactLevel),
}

impl BandKind {
    pub const ALL: [BandKind; 4] = [
        BandKind::Features,
        BandKind::Impact(ImpactLevel::Immediate),
        BandKind::Impact(ImpactLevel::Enabling),
        BandKind::Impact(ImpactLevel::Systemic),
    ];

    pub fn name(self) -> &'static str {
        match self {
            BandKind::Features => "features",
            BandKind::Impact(l) => l.as_str(),
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            BandKind::Features => "Features",
            BandKind::Impact(ImpactLevel::Immediate) => "Immediate",
            BandKind::Impact(ImpactLevel::Enabling) => "Enabling",
            BandKind::Impact(ImpactLevel::Systemic) => "Systemic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: i32,
    pub y: i32,
    pub w: i32,
    pub h: i32,
}

impl Rect {
    pub fn right(&self) -> i32 {
        self.x + self.w
    }

    pub fn bottom(&self) -> i32 {
        self.y + self.h
    }

    pub fn center_y(&self) -> i32 {
        self.y + self.h / 2
    }

    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.bottom() && other.y < self.bottom()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Band {
    pub kind: BandKind,
    pub frame: Rect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Feature,
    Variant,
    Concern,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeBox {
    /// Model id; variants use `feature.variant`.
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dimension: Option<Dimension>,
    /// Index into [`Layout::bands`].
    pub band: usize,
    pub rect: Rect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRoute {
    pub source: String,
    pub target: String,
    pub effect_type: EffectType,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Orthogonal polyline from the source box to the target box.
    pub points: Vec<Point>,
}

impl EdgeRoute {
    /// Midpoint of the middle segment, where the glyph is drawn.
    pub fn anchor(&self) -> Point {
        let i = (self.points.len() - 1) / 2;
        let (a, b) = (self.points[i], self.points[i + 1]);
        Point {
            x: (a.x + b.x) / 2,
            y: (a.y + b.y) / 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub width: i32,
    pub height: i32,
    pub bands: Vec<Band>,
    pub nodes: Vec<NodeBox>,
    pub edges: Vec<EdgeRoute>,
}

impl Layout {
    pub fn node(&self, id: &str) -> Option<&NodeBox> {
        self.nodes.iter().find(|n| n.id == id)
    }
}

/// Pure function of the canonical map: features (each followed by its
/// variants) fill the first band; concerns go to the band of their impact
/// level ordered by (dimension, id) top to bottom.
pub fn layout_dm(dm: &DecisionMap, config: &LayoutConfig) -> Layout {
    let dm = canonicalize(dm);
    let node_w = config.node_width.min(config.band_width);
    let pitch = config.node_height + config.row_gap;
    let band_x = |i: i32| config.margin + i * (config.band_width + config.channel);
    let top = config.margin + config.header;

    let mut rows = [0i32; 4];
    let mut nodes = Vec::new();
    let mut place = |band: usize, id: String, kind, label: String, dimension| {
        let rect = Rect {
            x: band_x(band as i32) + (config.band_width - node_w) / 2,
            y: top + rows[band] * pitch,
            w: node_w,
            h: config.node_height,
        };
        rows[band] += 1;
        nodes.push(NodeBox {
            id,
            kind,
            label,
            dimension,
            band,
            rect,
        });
    };
    for f in &dm.features {
        place(0, f.id.to_string(), NodeKind::Feature, f.name.clone(), None);
        for v in &f.variants {
            place(0, format!("{}.{}", f.id, v.id), NodeKind::Variant, v.name.clone(), None);
        }
    }
    let mut concerns: Vec<_> = dm.concerns.iter().collect();
    concerns.sort_by(|a, b| (a.impact, a.dimension, &a.id).cmp(&(b.impact, b.dimension, &b.id)));
    for c in concerns {
        let band = BandKind::ALL.iter().position(|b| *b == BandKind::Impact(c.impact)).unwrap_or(0);
        place(band, c.id.to_string(), NodeKind::Concern, c.name.clone(), Some(c.dimension));
    }

    let max_rows = rows.iter().copied().max().unwrap_or(0);
    let band_height = config.header + (max_rows * pitch - config.row_gap).max(0) + config.margin;
    let bands: Vec<Band> = BandKind::ALL
        .iter()
        .enumerate()
        .map(|(i, kind)| Band {
            kind: *kind,
            frame: Rect {
                x: band_x(i as i32),
                y: config.margin,
                w: config.band_width,
                h: band_height,
            },
        })
        .collect();

    let index: BTreeMap<&str, &NodeBox> = nodes.iter().map(|n| (n.id.as_str(), n)).collect();
    let mut edges = Vec::new();
    for (k, e) in dm.effects.iter().enumerate() {
        let source = e.source.to_string();
        let (Some(s), Some(t)) = (index.get(source.as_str()), index.get(e.target.as_str())) else {
            continue;
        };
        // Each edge gets its own lane in the channel so vertical runs
        // of different edges do not coincide.
        let lanes = (config.channel / 2).max(1);
        let lane = (k as i32 % lanes) - lanes / 2;
        let channel_x = bands[s.band].frame.right() + config.channel / 2 + lane;
        let start = Point {
            x: s.rect.right(),
            y: s.rect.center_y(),
        };
        let end = if t.band > s.band {
            Point {
                x: t.rect.x,
                y: t.rect.center_y(),
            }
        } else {
            Point {
                x: t.rect.right(),
                y: t.rect.center_y(),
            }
        };
        edges.push(EdgeRoute {
            source,
            target: e.target.to_string(),
            effect_type: e.effect_type,
            label: e.impact_label.clone(),
            points: vec![
                start,
                Point {
                    x: channel_x,
                    y: start.y,
                },
                Point {
                    x: channel_x,
                    y: end.y,
                },
                end,
            ],
        });
    }

    Layout {
        width: band_x(4) - config.channel + config.margin,
        height: band_height + 2 * config.margin,
        bands,
        nodes,
        edges,
    }
}

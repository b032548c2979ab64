//! Chart documents: JSON interchange, text grids and SVG in Adams (t − s, s)
//! coordinates.

use crate::jay::Page;
use crate::resolve::Resolution;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error)]
pub enum ChartError {
    #[error("invalid chart JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid chart config: {0}")]
    Config(#[from] toml::de::Error),
    #[error("edge {edge} references missing dot {dot}")]
    MissingDot { edge: usize, dot: usize },
    #[error("edge {edge} of kind {kind:?} has bidegree offset ({dstem},{ds})")]
    BadEdge { edge: usize, kind: EdgeKind, dstem: i32, ds: i64 },
    #[error("duplicate dot ({stem},{s}) #{index}")]
    DuplicateDot { stem: i32, s: usize, index: usize },
    #[error("grid needs {need} columns but the width is {width}")]
    TooWide { need: usize, width: usize },
    #[error("unknown product {0}")]
    UnknownProduct(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartMeta {
    pub prime: u32,
    pub algebra: String,
    pub module: String,
    pub page: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dot {
    pub stem: i32,
    pub s: usize,
    pub index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    H0,
    H1,
    OtherProduct,
    Differential,
}

impl EdgeKind {
    fn class(self) -> &'static str {
        match self {
            EdgeKind::H0 => "h0",
            EdgeKind::H1 => "h1",
            EdgeKind::OtherProduct => "product",
            EdgeKind::Differential => "differential",
        }
    }
}

/// An edge between two dots, by position in `ChartDoc::dots`. Differentials
/// carry their page.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub page: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartDoc {
    pub metadata: ChartMeta,
    pub dots: Vec<Dot>,
    pub edges: Vec<Edge>,
}

/// A filtration-one product drawn as an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Product {
    H0,
    H1,
}

impl std::str::FromStr for Product {
    type Err = ChartError;
    fn from_str(s: &str) -> Result<Self, ChartError> {
        match s {
            "h0" | "v0" => Ok(Product::H0),
            "h1" => Ok(Product::H1),
            _ => Err(ChartError::UnknownProduct(s.to_string())),
        }
    }
}

type Table = BTreeMap<(usize, i32), usize>;

impl ChartDoc {
    pub fn new(metadata: ChartMeta) -> ChartDoc {
        ChartDoc { metadata, dots: Vec::new(), edges: Vec::new() }
    }

    /// One dot per basis element of a (s, t) ↦ dim table.
    pub fn from_dims(metadata: ChartMeta, dims: &Table) -> ChartDoc {
        let mut doc = ChartDoc::new(metadata);
        for (&(s, t), &n) in dims {
            doc.dots.extend((0..n).map(|index| Dot { stem: t - s as i32, s, index }));
        }
        doc.dots.sort();
        doc
    }

    /// The Ext chart of a resolution with the requested product edges.
    pub fn from_resolution(res: &Resolution, products: &[Product], page: &str) -> ChartDoc {
        let algebra = res.algebra();
        let metadata = ChartMeta {
            prime: res.prime(),
            algebra: algebra.name().to_string(),
            module: res.module().name(),
            page: page.to_string(),
        };
        let mut doc = ChartDoc::from_dims(metadata, &res.ext_dims());
        let p = res.prime();
        for &prod in products {
            let (degree, kind) = match prod {
                Product::H0 => (1usize, EdgeKind::H0),
                Product::H1 => (if p == 2 { 2 } else { 2 * p as usize - 2 }, EdgeKind::H1),
            };
            if algebra.max_degree() < degree || algebra.dim(degree) == 0 {
                continue;
            }
            // The primitive is the last basis element of its degree: Sq(2^i),
            // P(p^i) or Q_0 in the orderings used by the algebra.
            let theta = (degree, algebra.dim(degree) - 1);
            for s in 0..res.s_max() {
                for t in res.t_min()..=res.t_max() {
                    if res.gens_in_degree(s, t).is_empty() {
                        continue;
                    }
                    let m = res.primitive_product_matrix(theta, s, t);
                    for i in 0..m.rows() {
                        for (j, _) in m.row(i).nonzero_entries() {
                            let from = Dot { stem: t - s as i32, s, index: i };
                            let to = Dot { stem: t + degree as i32 - s as i32 - 1, s: s + 1, index: j };
                            doc.push_edge(from, to, kind, None);
                        }
                    }
                }
            }
        }
        doc.canonicalize();
        doc
    }

    /// A spectral sequence page; each unit of d_r rank becomes an arrow.
    pub fn from_page(metadata: ChartMeta, page: &Page) -> ChartDoc {
        let dims = page.window_dims();
        let mut doc = ChartDoc::from_dims(metadata, &dims);
        let r = page.r;
        for (&(s, t), &n) in &page.out {
            let target = (s + r, t + r as i32 - 1);
            let available = dims.get(&target).copied().unwrap_or(0);
            for i in 0..n.min(available) {
                let from = Dot { stem: t - s as i32, s, index: i };
                let to = Dot { stem: target.1 - target.0 as i32, s: target.0, index: i };
                doc.push_edge(from, to, EdgeKind::Differential, Some(r));
            }
        }
        doc.canonicalize();
        doc
    }

    fn position(&self, d: &Dot) -> Option<usize> {
        self.dots.binary_search(d).ok()
    }

    /// Adds an edge between two dots if both are present. Dots must be sorted.
    fn push_edge(&mut self, from: Dot, to: Dot, kind: EdgeKind, page: Option<usize>) {
        if let (Some(from), Some(to)) = (self.position(&from), self.position(&to)) {
            self.edges.push(Edge { from, to, kind, page });
        }
    }

    /// Sorts dots by (stem, s, index) and edges lexicographically.
    pub fn canonicalize(&mut self) {
        let mut order: Vec<usize> = (0..self.dots.len()).collect();
        order.sort_by_key(|&i| self.dots[i]);
        let mut new_pos = vec![0; self.dots.len()];
        for (new, &old) in order.iter().enumerate() {
            new_pos[old] = new;
        }
        self.dots = order.iter().map(|&i| self.dots[i]).collect();
        for e in &mut self.edges {
            if e.from < new_pos.len() && e.to < new_pos.len() {
                e.from = new_pos[e.from];
                e.to = new_pos[e.to];
            }
        }
        self.edges.sort();
        self.edges.dedup();
    }

    /// Endpoints exist and every edge has the offset of its kind.
    pub fn validate(&self) -> Result<(), ChartError> {
        let mut seen = std::collections::BTreeSet::new();
        for d in &self.dots {
            if !seen.insert(*d) {
                return Err(ChartError::DuplicateDot { stem: d.stem, s: d.s, index: d.index });
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            let from = self.dots.get(e.from).ok_or(ChartError::MissingDot { edge: i, dot: e.from })?;
            let to = self.dots.get(e.to).ok_or(ChartError::MissingDot { edge: i, dot: e.to })?;
            let (dstem, ds) = (to.stem - from.stem, to.s as i64 - from.s as i64);
            let ok = match e.kind {
                EdgeKind::H0 => (dstem, ds) == (0, 1),
                EdgeKind::H1 => (dstem, ds) == (1, 1),
                EdgeKind::OtherProduct => ds >= 0,
                EdgeKind::Differential => e.page.is_some_and(|r| (dstem, ds) == (-1, r as i64)),
            };
            if !ok {
                return Err(ChartError::BadEdge { edge: i, kind: e.kind, dstem, ds });
            }
        }
        Ok(())
    }

    /// Number of dots in each stem.
    pub fn column_counts(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for d in &self.dots {
            *out.entry(d.stem).or_insert(0) += 1;
        }
        out
    }

    /// Number of dots at each (stem, s).
    pub fn cell_counts(&self) -> BTreeMap<(i32, usize), usize> {
        let mut out = BTreeMap::new();
        for d in &self.dots {
            *out.entry((d.stem, d.s)).or_insert(0) += 1;
        }
        out
    }

    /// The sub-chart with stem ≤ stem_max and s ≤ s_max.
    pub fn restrict(&self, stem_max: Option<i32>, s_max: Option<usize>) -> ChartDoc {
        let keep = |d: &Dot| stem_max.is_none_or(|m| d.stem <= m) && s_max.is_none_or(|m| d.s <= m);
        let mut pos = vec![None; self.dots.len()];
        let mut dots = Vec::new();
        for (i, d) in self.dots.iter().enumerate() {
            if keep(d) {
                pos[i] = Some(dots.len());
                dots.push(*d);
            }
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| Some(Edge { from: pos.get(e.from).copied()??, to: pos.get(e.to).copied()??, ..*e }))
            .collect();
        ChartDoc { metadata: self.metadata.clone(), dots, edges }
    }
}

/// Canonical JSON: sorted dots and edges, fixed field order, trailing newline.
pub fn emit_json(chart: &ChartDoc) -> String {
    let mut doc = chart.clone();
    doc.canonicalize();
    let mut out = serde_json::to_string_pretty(&doc).expect("chart documents always serialize");
    out.push('\n');
    out
}

pub fn read_json(text: &str) -> Result<ChartDoc, ChartError> {
    let doc: ChartDoc = serde_json::from_str(text)?;
    doc.validate()?;
    Ok(doc)
}

/// Fixed-width grid, s decreasing downwards to 0, one cell per stem showing
/// the dot count (blank for 0).
pub fn emit_text(chart: &ChartDoc, width: usize) -> Result<String, ChartError> {
    let cells = chart.cell_counts();
    let stem_max = chart.dots.iter().map(|d| d.stem).max().unwrap_or(0).max(0);
    let stem_min = chart.dots.iter().map(|d| d.stem).min().unwrap_or(0).min(0);
    let s_max = chart.dots.iter().map(|d| d.s).max().unwrap_or(0);
    const CELL: usize = 3;
    const LABEL: usize = 4;
    let ncols = (stem_max - stem_min + 1) as usize;
    let need = LABEL + CELL * ncols;
    if need > width {
        return Err(ChartError::TooWide { need, width });
    }
    let m = &chart.metadata;
    let mut out = String::new();
    let _ = writeln!(out, "# p={} algebra={} module={} page={}", m.prime, m.algebra, m.module, m.page);
    let _ = writeln!(out, "# rows: s, columns: t-s, cells: number of classes");
    for s in (0..=s_max).rev() {
        let _ = write!(out, "{s:>3}|");
        for stem in stem_min..=stem_max {
            match cells.get(&(stem, s)) {
                Some(n) => {
                    let _ = write!(out, "{n:>CELL$}");
                }
                None => out.push_str(&" ".repeat(CELL)),
            }
        }
        out.truncate(out.trim_end_matches(' ').len());
        out.push('\n');
    }
    let _ = writeln!(out, "{}+{}", " ".repeat(LABEL - 1), "-".repeat(CELL * ncols));
    out.push_str(&" ".repeat(LABEL));
    for stem in stem_min..=stem_max {
        let _ = write!(out, "{stem:>CELL$}");
    }
    out.push('\n');
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvgStyle {
    /// Grid unit: a dot at (stem, s) sits at (stem·unit, −s·unit).
    pub unit: f64,
    pub dot_radius: f64,
    pub margin: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { unit: 20.0, dot_radius: 2.5, margin: 20.0 }
    }
}

/// Horizontal offset of the index-th of n dots sharing a bidegree.
fn spread(style: &SvgStyle, index: usize, n: usize) -> f64 {
    (index as f64 - (n as f64 - 1.0) / 2.0) * style.dot_radius * 2.4
}

pub fn emit_svg(chart: &ChartDoc, style: &SvgStyle) -> String {
    let u = style.unit;
    let cells = chart.cell_counts();
    let pos = |d: &Dot| {
        let n = cells.get(&(d.stem, d.s)).copied().unwrap_or(1);
        (d.stem as f64 * u + spread(style, d.index, n), -(d.s as f64) * u)
    };
    let stem_max = chart.dots.iter().map(|d| d.stem).max().unwrap_or(0).max(0);
    let stem_min = chart.dots.iter().map(|d| d.stem).min().unwrap_or(0).min(0);
    let s_max = chart.dots.iter().map(|d| d.s).max().unwrap_or(0);
    let (x0, x1) = (stem_min as f64 * u - style.margin, stem_max as f64 * u + style.margin);
    let (y0, y1) = (-(s_max as f64) * u - style.margin, style.margin);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.2} {:.2} {:.2} {:.2}" width="{:.0}" height="{:.0}">"#,
        x0,
        y0,
        x1 - x0,
        y1 - y0,
        x1 - x0,
        y1 - y0
    );
    out.push_str(concat!(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 6 6\" refX=\"6\" refY=\"3\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\">",
        "<path d=\"M0,0 L6,3 L0,6 z\"/></marker></defs>\n",
        "<style>.axis{stroke:#888;stroke-width:0.5}.label{font-size:6px;fill:#444}",
        ".h0,.h1{stroke:#000;stroke-width:0.8}.product{stroke:#06c;stroke-width:0.8}",
        ".differential{stroke:#c00;stroke-width:0.8;marker-end:url(#arrow)}.dot{fill:#000}</style>\n"
    ));
    let _ = writeln!(out, r#"<g class="axes">"#);
    let _ = writeln!(out, r#"<line class="axis" x1="{:.2}" y1="0.00" x2="{:.2}" y2="0.00"/>"#, stem_min as f64 * u, stem_max as f64 * u);
    let _ = writeln!(out, r#"<line class="axis" x1="0.00" y1="0.00" x2="0.00" y2="{:.2}"/>"#, -(s_max as f64) * u);
    for stem in (stem_min..=stem_max).filter(|n| n % 2 == 0) {
        let _ = writeln!(out, r#"<text class="label" x="{:.2}" y="{:.2}">{stem}</text>"#, stem as f64 * u - 2.0, 0.6 * u);
    }
    for s in (0..=s_max).filter(|s| s % 2 == 0) {
        let _ = writeln!(out, r#"<text class="label" x="{:.2}" y="{:.2}">{s}</text>"#, stem_min as f64 * u - 0.8 * u, -(s as f64) * u + 2.0);
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g class="edges">"#);
    for e in &chart.edges {
        let (Some(a), Some(b)) = (chart.dots.get(e.from), chart.dots.get(e.to)) else { continue };
        let ((xa, ya), (xb, yb)) = (pos(a), pos(b));
        let page = e.page.map(|r| format!(r#" data-page="{r}""#)).unwrap_or_default();
        let _ = writeln!(
            out,
            r#"<line class="{}"{page} x1="{xa:.2}" y1="{ya:.2}" x2="{xb:.2}" y2="{yb:.2}"/>"#,
            e.kind.class()
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g class="dots">"#);
    for d in &chart.dots {
        let (x, y) = pos(d);
        let _ = writeln!(
            out,
            r#"<circle class="dot" data-stem="{}" data-s="{}" cx="{x:.2}" cy="{y:.2}" r="{:.2}"/>"#,
            d.stem, d.s, style.dot_radius
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

/// Chart window, products and style, from a TOML file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChartConfig {
    pub stem_max: Option<i32>,
    pub s_max: Option<usize>,
    pub products: Vec<Product>,
    pub text_width: usize,
    pub style: SvgStyle,
}

impl Default for ChartConfig {
    fn default() -> Self {
        ChartConfig { stem_max: None, s_max: None, products: vec![Product::H0, Product::H1], text_width: 200, style: SvgStyle::default() }
    }
}

impl ChartConfig {
    pub fn from_toml(text: &str) -> Result<ChartConfig, ChartError> {
        Ok(toml::from_str(text)?)
    }

    pub fn apply(&self, chart: &ChartDoc) -> ChartDoc {
        chart.restrict(self.stem_max, self.s_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> ChartMeta {
        ChartMeta { prime: 2, algebra: "A(1)".into(), module: "F2".into(), page: "E2".into() }
    }

    #[test]
    fn empty_chart() {
        let doc = ChartDoc::new(meta());
        let json = emit_json(&doc);
        assert!(json.contains("\"dots\": []") && json.contains("\"edges\": []"));
        assert_eq!(read_json(&json).unwrap(), doc);
        let svg = emit_svg(&doc, &SvgStyle::default());
        assert!(svg.starts_with("<svg") && !svg.contains("<circle"));
        let text = emit_text(&doc, 80).unwrap();
        assert!(!text.lines().any(|l| l.starts_with("  0|") && l.len() > 4));
    }

    #[test]
    fn validation_rejects_bad_edges() {
        let mut doc = ChartDoc::from_dims(meta(), &[((0, 0), 1), ((1, 1), 1), ((1, 2), 1)].into_iter().collect());
        doc.edges.push(Edge { from: 0, to: 1, kind: EdgeKind::H0, page: None });
        doc.validate().unwrap();
        doc.edges.push(Edge { from: 0, to: 2, kind: EdgeKind::H0, page: None });
        assert!(matches!(doc.validate(), Err(ChartError::BadEdge { .. })));
        doc.edges.pop();
        doc.edges.push(Edge { from: 0, to: 7, kind: EdgeKind::H1, page: None });
        assert!(matches!(doc.validate(), Err(ChartError::MissingDot { .. })));
        doc.edges.pop();
        doc.edges.push(Edge { from: 2, to: 0, kind: EdgeKind::Differential, page: Some(2) });
        assert!(doc.validate().is_err());
    }

    #[test]
    fn text_grid_layout() {
        let doc = ChartDoc::from_dims(meta(), &[((0, 0), 1), ((1, 1), 1), ((1, 3), 2)].into_iter().collect());
        let text = emit_text(&doc, 80).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[2], "  1|  1     2");
        assert_eq!(lines[3], "  0|  1");
        assert!(matches!(emit_text(&doc, 8), Err(ChartError::TooWide { need: 13, width: 8 })));
    }

    #[test]
    fn svg_coordinates() {
        let doc = ChartDoc::from_dims(meta(), &[((2, 9), 1)].into_iter().collect());
        let svg = emit_svg(&doc, &SvgStyle { unit: 10.0, ..SvgStyle::default() });
        assert!(svg.contains(r#"cx="70.00" cy="-20.00""#), "{svg}");
    }

    #[test]
    fn config_defaults_and_overrides() {
        let c = ChartConfig::from_toml("stem_max = 12\nproducts = [\"h0\"]\n[style]\nunit = 8.0\n").unwrap();
        assert_eq!(c.stem_max, Some(12));
        assert_eq!(c.products, vec![Product::H0]);
        assert_eq!(c.style.unit, 8.0);
        assert_eq!(c.style.dot_radius, SvgStyle::default().dot_radius);
        assert!(ChartConfig::from_toml("products = [\"h9\"]").is_err());
    }
}

//! Static SVG renderings: semicircular walls in the `(beta, alpha)` plane and
//! table heatmaps. All geometry is computed exactly elsewhere; conversion to
//! `f64` happens only here, at rendering time.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::bncore::CellLabel;
use crate::stability::{Region, Wall};
use crate::Character;

fn approx(q: &BigRational) -> f64 {
    q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN)
}

const W: f64 = 760.0;
const H: f64 = 480.0;
const MARGIN: f64 = 40.0;

struct Frame {
    beta_min: f64,
    alpha_max: f64,
    scale: f64,
}

impl Frame {
    fn new(region: &Region) -> Frame {
        let beta_min = approx(region.beta_lo());
        let beta_max = approx(region.beta_hi());
        let alpha_max = approx(region.alpha_hi());
        let scale = ((W - 2.0 * MARGIN) / (beta_max - beta_min))
            .min((H - 2.0 * MARGIN) / alpha_max);
        Frame {
            beta_min,
            alpha_max,
            scale,
        }
    }

    fn x(&self, beta: f64) -> f64 {
        MARGIN + (beta - self.beta_min) * self.scale
    }

    fn y(&self, alpha: f64) -> f64 {
        MARGIN + (self.alpha_max - alpha) * self.scale
    }
}

/// Semicircle/line diagram of walls; `highlight` is stroked in red (the
/// first wall) and `gieseker_ray` draws the ray `beta = 0, alpha > 0`.
pub fn walls_svg(
    v: &Character,
    walls: &[(Character, Wall)],
    region: &Region,
    highlight: Option<&Wall>,
    gieseker_ray: bool,
) -> String {
    let frame = Frame::new(region);
    let axis_y = frame.y(0.0);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // beta axis
    out.push_str(&format!(
        "<line x1=\"0\" y1=\"{axis_y:.4}\" x2=\"{W}\" y2=\"{axis_y:.4}\" \
         stroke=\"black\" stroke-width=\"1\"/>\n"
    ));
    if gieseker_ray {
        let x0 = frame.x(0.0);
        out.push_str(&format!(
            "<line x1=\"{x0:.4}\" y1=\"0\" x2=\"{x0:.4}\" y2=\"{axis_y:.4}\" \
             stroke=\"darkgreen\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\">\
             <title>Gieseker ray beta = 0</title></line>\n"
        ));
    }
    for (u, wall) in walls {
        let is_highlight = highlight.is_some_and(|h| h == wall);
        let color = if is_highlight { "crimson" } else { "steelblue" };
        let width = if is_highlight { 2.0 } else { 1.2 };
        let title = format!("u = {u}; {wall}");
        if wall.is_line() {
            let x = frame.x(approx(&wall.center()));
            out.push_str(&format!(
                "<line x1=\"{x:.4}\" y1=\"0\" x2=\"{x:.4}\" y2=\"{axis_y:.4}\" \
                 stroke=\"{color}\" stroke-width=\"{width}\"><title>{title}</title></line>\n"
            ));
        } else {
            let center = approx(&wall.center());
            let radius = approx(&wall.radius_sq().expect("circle")).sqrt();
            let r_px = radius * frame.scale;
            let x1 = frame.x(center - radius);
            let x2 = frame.x(center + radius);
            out.push_str(&format!(
                "<path d=\"M {x1:.4} {axis_y:.4} A {r_px:.4} {r_px:.4} 0 0 1 {x2:.4} {axis_y:.4}\" \
                 fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\">\
                 <title>{title}</title></path>\n"
            ));
        }
    }
    out.push_str(&format!(
        "<text x=\"{:.4}\" y=\"{:.4}\" font-size=\"13\" font-family=\"monospace\">v = {}</text>\n",
        MARGIN,
        MARGIN - 14.0,
        v
    ));
    out.push_str("</svg>\n");
    out
}

fn cell_color(label: Option<CellLabel>) -> &'static str {
    match label {
        None => "#ffffff",
        Some(CellLabel::Empty) => "#d9d9d9",
        Some(CellLabel::Bn) => "#8fbc8f",
        Some(CellLabel::Klm) => "#87aade",
        Some(CellLabel::New) => "#e8a838",
    }
}

/// Heatmap of a `(d, r)` classification grid; `None` cells are the excluded
/// `chi = 0` diagonal.
pub fn table_svg(d_range: (i64, i64), r_range: (i64, i64), grid: &[Vec<Option<CellLabel>>]) -> String {
    let cols = (r_range.1 - r_range.0 + 1) as f64;
    let rows = (d_range.1 - d_range.0 + 1) as f64;
    let cell = 54.0;
    let left = 60.0;
    let top = 40.0;
    let width = left + cols * cell + 20.0;
    let height = top + rows * cell + 20.0;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (i, r) in (r_range.0..=r_range.1).enumerate() {
        let x = left + i as f64 * cell + cell / 2.0;
        out.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" \
             font-family=\"monospace\">r={r}</text>\n",
            top - 10.0
        ));
    }
    for (j, d) in (d_range.0..=d_range.1).enumerate() {
        let y = top + j as f64 * cell + cell / 2.0 + 4.0;
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{y:.1}\" font-size=\"13\" text-anchor=\"end\" \
             font-family=\"monospace\">d={d}</text>\n",
            left - 8.0
        ));
        for (i, _r) in (r_range.0..=r_range.1).enumerate() {
            let label = grid[j][i];
            let x = left + i as f64 * cell;
            let yrect = top + j as f64 * cell;
            out.push_str(&format!(
                "<rect x=\"{x:.1}\" y=\"{yrect:.1}\" width=\"{cell}\" height=\"{cell}\" \
                 fill=\"{}\" stroke=\"#666\" stroke-width=\"0.5\"/>\n",
                cell_color(label)
            ));
            let text = label.map_or("-", |l| l.as_str());
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\" \
                 font-family=\"monospace\">{text}</text>\n",
                x + cell / 2.0,
                yrect + cell / 2.0 + 4.0
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

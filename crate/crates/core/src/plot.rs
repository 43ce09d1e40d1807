//! Static SVG output: the slit as a polyline in the half-plane, and the
//! driving function as a step plot.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 32.0;

struct Frame {
    x0: f64,
    y0: f64,
    scale_x: f64,
    scale_y: f64,
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone, equal: bool) -> Frame {
        let (mut xmin, mut xmax) = bounds(xs);
        let (mut ymin, mut ymax) = bounds(ys);
        if xmax - xmin < 1e-12 {
            xmin -= 0.5;
            xmax += 0.5;
        }
        if ymax - ymin < 1e-12 {
            ymin -= 0.5;
            ymax += 0.5;
        }
        let mut scale_x = (WIDTH - 2.0 * MARGIN) / (xmax - xmin);
        let mut scale_y = (HEIGHT - 2.0 * MARGIN) / (ymax - ymin);
        if equal {
            let s = scale_x.min(scale_y);
            scale_x = s;
            scale_y = s;
            // center the shorter extent
            xmin -= ((WIDTH - 2.0 * MARGIN) / s - (xmax - xmin)) / 2.0;
        }
        Frame {
            x0: xmin,
            y0: ymin,
            scale_x,
            scale_y,
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            MARGIN + (x - self.x0) * self.scale_x,
            HEIGHT - MARGIN - (y - self.y0) * self.scale_y,
        )
    }
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <title>{title}</title>\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn polyline(points: &[(f64, f64)], stroke: &str) -> String {
    let mut s = String::from("<polyline fill=\"none\" stroke=\"");
    s.push_str(stroke);
    s.push_str("\" stroke-width=\"1.5\" points=\"");
    for (i, (x, y)) in points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.2},{y:.2}");
    }
    s.push_str("\"/>\n");
    s
}

/// The slit in the upper half-plane with the real axis drawn below it.
pub fn trace_svg(points: &[(f64, f64)]) -> String {
    let frame = Frame::fit(
        points.iter().map(|p| p.0),
        points.iter().map(|p| p.1).chain(std::iter::once(0.0)),
        true,
    );
    let mut s = header("slit trace");
    let (ax0, ay) = frame.map(frame.x0, 0.0);
    let _ = writeln!(
        s,
        "<line x1=\"{ax0:.2}\" y1=\"{ay:.2}\" x2=\"{:.2}\" y2=\"{ay:.2}\" stroke=\"gray\"/>",
        WIDTH - MARGIN
    );
    let mapped: Vec<(f64, f64)> = points.iter().map(|&(x, y)| frame.map(x, y)).collect();
    s.push_str(&polyline(&mapped, "black"));
    s.push_str("</svg>\n");
    s
}

/// Step plot of `lambda(t)`: each sample holds until the next time.
pub fn drive_svg(samples: &[(f64, f64)]) -> String {
    let frame = Frame::fit(
        samples.iter().map(|p| p.0),
        samples.iter().map(|p| p.1),
        false,
    );
    let mut steps = Vec::with_capacity(2 * samples.len());
    for (i, &(t, l)) in samples.iter().enumerate() {
        if i > 0 {
            steps.push(frame.map(t, samples[i - 1].1));
        }
        steps.push(frame.map(t, l));
    }
    let mut s = header("driving function");
    s.push_str(&polyline(&steps, "black"));
    s.push_str("</svg>\n");
    s
}

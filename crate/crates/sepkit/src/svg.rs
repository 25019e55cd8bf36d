//! Minimal SVG rendering for portraits and direction fields.
//!
//! Presentation only: coordinates are fixed-precision so output is stable,
//! but SVG files carry no byte-exactness guarantee (JSON and CSV do).

use sepkit_core::{Complex64, Rectangle};

pub struct SvgCanvas {
    domain: Rectangle,
    width: f64,
    height: f64,
    body: String,
}

impl SvgCanvas {
    pub fn new(domain: Rectangle, width_px: f64) -> Self {
        let height = width_px * domain.height() / domain.width();
        Self {
            domain,
            width: width_px,
            height,
            body: String::new(),
        }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        let x = (z.re - self.domain.x_min) / self.domain.width() * self.width;
        let y = (self.domain.y_max - z.im) / self.domain.height() * self.height;
        (x, y)
    }

    pub fn polyline(&mut self, points: &[Complex64], class: &str, color: &str) {
        if points.is_empty() {
            return;
        }
        let mut attr = String::new();
        for &z in points {
            let (x, y) = self.map(z);
            attr.push_str(&format!("{x:.2},{y:.2} "));
        }
        self.body.push_str(&format!(
            "<polyline class=\"{class}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"0.8\" points=\"{}\"/>\n",
            attr.trim_end()
        ));
    }

    /// Small triangle at `at`, oriented along `dir`.
    pub fn arrowhead(&mut self, at: Complex64, dir: Complex64, size_px: f64, class: &str, color: &str) {
        let n = dir.norm();
        if n == 0.0 {
            return;
        }
        let u = dir / n;
        let (x, y) = self.map(at);
        // Screen orientation: the y axis is flipped.
        let (ux, uy) = (u.re, -u.im);
        let (px, py) = (-uy, ux);
        let tip = (x + ux * size_px, y + uy * size_px);
        let left = (x - ux * size_px * 0.4 + px * size_px * 0.5, y - uy * size_px * 0.4 + py * size_px * 0.5);
        let right = (x - ux * size_px * 0.4 - px * size_px * 0.5, y - uy * size_px * 0.4 - py * size_px * 0.5);
        self.body.push_str(&format!(
            "<path class=\"{class}\" fill=\"{color}\" d=\"M {:.2} {:.2} L {:.2} {:.2} L {:.2} {:.2} Z\"/>\n",
            tip.0, tip.1, left.0, left.1, right.0, right.1
        ));
    }

    /// Arrow glyph (shaft plus head) centered at a grid node.
    pub fn arrow(&mut self, at: Complex64, dir: Complex64, len_px: f64, class: &str, color: &str) {
        let n = dir.norm();
        self.body.push_str(&format!("<g class=\"{class}\">"));
        if n > 0.0 {
            let u = dir / n;
            let (x, y) = self.map(at);
            let (ux, uy) = (u.re, -u.im);
            let half = 0.5 * len_px;
            self.body.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-width=\"0.9\"/>",
                x - ux * half,
                y - uy * half,
                x + ux * half,
                y + uy * half
            ));
            let (px, py) = (-uy, ux);
            let hx = x + ux * half;
            let hy = y + uy * half;
            let back = 0.35 * len_px;
            self.body.push_str(&format!(
                "<path fill=\"{color}\" d=\"M {hx:.2} {hy:.2} L {:.2} {:.2} L {:.2} {:.2} Z\"/>",
                hx - ux * back + px * back * 0.45,
                hy - uy * back + py * back * 0.45,
                hx - ux * back - px * back * 0.45,
                hy - uy * back - py * back * 0.45
            ));
        } else {
            // A stationary node still gets its glyph so counts stay exact.
            let (x, y) = self.map(at);
            self.body.push_str(&format!(
                "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"1.2\" fill=\"{color}\"/>"
            ));
        }
        self.body.push_str("</g>\n");
    }

    pub fn marker(&mut self, at: Complex64, radius_px: f64, class: &str, color: &str) {
        let (x, y) = self.map(at);
        self.body.push_str(&format!(
            "<circle class=\"{class}\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{radius_px:.2}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\"/>\n"
        ));
    }

    pub fn finish(self) -> String {
        format!(
            concat!(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" ",
                "viewBox=\"0 0 {w:.2} {h:.2}\">\n",
                "<defs><clipPath id=\"frame\"><rect x=\"0\" y=\"0\" width=\"{w:.2}\" height=\"{h:.2}\"/></clipPath></defs>\n",
                "<rect width=\"{w:.2}\" height=\"{h:.2}\" fill=\"white\"/>\n",
                "<g clip-path=\"url(#frame)\">\n{body}</g>\n</svg>\n"
            ),
            w = self.width,
            h = self.height,
            body = self.body
        )
    }
}

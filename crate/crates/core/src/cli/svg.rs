//! Minimal SVG line/scatter plots.

use std::fmt::Write;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
];

pub fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

pub struct Plot {
    x_range: (f64, f64),
    y_range: (f64, f64),
    body: String,
    legend: Vec<(String, &'static str)>,
    title: String,
    x_label: String,
    y_label: String,
}

impl Plot {
    pub fn new(
        title: &str,
        x_label: &str,
        y_label: &str,
        x_range: (f64, f64),
        y_range: (f64, f64),
    ) -> Self {
        Plot {
            x_range,
            y_range,
            body: String::new(),
            legend: Vec::new(),
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
        }
    }

    fn px(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range;
        MARGIN + (x - lo) / (hi - lo) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        let (lo, hi) = self.y_range;
        HEIGHT - MARGIN - (y - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN)
    }

    pub fn line(
        &mut self,
        points: &[(f64, f64)],
        stroke: &'static str,
        dashed: bool,
        label: Option<String>,
    ) {
        let pts: Vec<String> = points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        if pts.is_empty() {
            return;
        }
        let dash = if dashed {
            " stroke-dasharray=\"5,3\""
        } else {
            ""
        };
        let _ = writeln!(
            self.body,
            "<polyline class=\"series\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.6\"{dash} points=\"{}\"/>",
            pts.join(" ")
        );
        if let Some(l) = label {
            self.legend.push((l, stroke));
        }
    }

    pub fn points(&mut self, points: &[(f64, f64)], fill: &'static str, radius: f64) {
        for &(x, y) in points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
        {
            let _ = writeln!(
                self.body,
                "<circle class=\"point\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"{radius}\" fill=\"{fill}\" fill-opacity=\"0.6\"/>",
                self.px(x),
                self.py(y)
            );
        }
    }

    /// Short vertical ticks at the bottom of the plot area.
    pub fn rug(&mut self, xs: &[f64], stroke: &'static str) {
        let y0 = self.py(self.y_range.0);
        for &x in xs
            .iter()
            .filter(|x| x.is_finite() && **x >= self.x_range.0 && **x <= self.x_range.1)
        {
            let px = self.px(x);
            let _ = writeln!(
                self.body,
                "<line class=\"rug\" x1=\"{px:.2}\" y1=\"{y0:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"{stroke}\"/>",
                y0 - 8.0
            );
        }
    }

    fn axes(&self, out: &mut String) {
        let (x0, x1) = (self.px(self.x_range.0), self.px(self.x_range.1));
        let (y0, y1) = (self.py(self.y_range.0), self.py(self.y_range.1));
        let _ = writeln!(
            out,
            "<rect x=\"{x0:.2}\" y=\"{y1:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>",
            x1 - x0,
            y0 - y1
        );
        for k in 0..=4 {
            let f = k as f64 / 4.0;
            let xv = self.x_range.0 + f * (self.x_range.1 - self.x_range.0);
            let yv = self.y_range.0 + f * (self.y_range.1 - self.y_range.0);
            let (px, py) = (self.px(xv), self.py(yv));
            let _ = writeln!(
                out,
                "<line x1=\"{px:.2}\" y1=\"{y0:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\
                 <text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
                y0 + 4.0,
                y0 + 17.0,
                tick(xv)
            );
            let _ = writeln!(
                out,
                "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{x0:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>\
                 <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
                x0 - 4.0,
                x0 - 7.0,
                py + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
            WIDTH / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"16\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{}</text>",
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
            WIDTH / 2.0,
            escape(&self.title)
        );
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        );
        self.axes(&mut out);
        out.push_str(&self.body);
        for (i, (label, stroke)) in self.legend.iter().enumerate() {
            let y = MARGIN + 14.0 + 15.0 * i as f64;
            let x = WIDTH - MARGIN - 110.0;
            let _ = writeln!(
                out,
                "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{stroke}\" stroke-width=\"2\"/>\
                 <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{}</text>",
                y - 4.0,
                x + 18.0,
                y - 4.0,
                x + 22.0,
                y,
                escape(label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_series_and_points() {
        let mut p = Plot::new("t", "x", "y", (0.0, 1.0), (0.0, 1.0));
        p.line(
            &[(0.0, 0.0), (1.0, 1.0)],
            color(0),
            false,
            Some("a<b".into()),
        );
        p.points(&[(0.5, 0.5), (f64::NAN, 0.1)], color(1), 3.0);
        let svg = p.render();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("class=\"point\"").count(), 1);
        assert!(svg.contains("a&lt;b"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}

//! Self-contained SVG plot: observed trajectory as a line, computed values
//! as dots.

use theorist::series::TimeSeries;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

struct Mapper {
    n: f64,
    y_min: f64,
    y_max: f64,
}

impl Mapper {
    fn x(&self, k: usize) -> f64 {
        MARGIN + (k as f64 / self.n) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-9);
        HEIGHT - MARGIN - ((v - self.y_min) / span) * (HEIGHT - 2.0 * MARGIN)
    }
}

/// Render the observed series (blue line with point markers) against the
/// computed one (red dots). Both series include their initial value.
pub fn series_plot(observed: &TimeSeries, computed: &TimeSeries) -> String {
    let obs = observed.values();
    let comp = computed.values();
    let y_min = obs
        .iter()
        .chain(comp.iter())
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let y_max = obs
        .iter()
        .chain(comp.iter())
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let m = Mapper {
        n: (obs.len().max(2) - 1) as f64,
        y_min,
        y_max,
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes with end labels.
    let x0 = MARGIN;
    let x1 = WIDTH - MARGIN;
    let y0 = HEIGHT - MARGIN;
    let y1 = MARGIN;
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{x0}\" y=\"{}\" font-size=\"12\">k=0</text>\n",
        y0 + 16.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\">k={}</text>\n",
        x1 - 20.0,
        y0 + 16.0,
        obs.len() - 1
    ));
    svg.push_str(&format!(
        "<text x=\"4\" y=\"{y0}\" font-size=\"12\">{y_min}</text>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"4\" y=\"{}\" font-size=\"12\">{y_max}</text>\n",
        y1 + 4.0
    ));

    let points: String = obs
        .iter()
        .enumerate()
        .map(|(k, v)| format!("{:.2},{:.2} ", m.x(k), m.y(*v)))
        .collect();
    svg.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"1.5\" points=\"{}\"/>\n",
        points.trim_end()
    ));
    for (k, v) in obs.iter().enumerate() {
        svg.push_str(&format!(
            "<circle class=\"obs\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"blue\"/>\n",
            m.x(k),
            m.y(*v)
        ));
    }
    for (k, v) in comp.iter().enumerate() {
        svg.push_str(&format!(
            "<circle class=\"comp\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.5\" fill=\"none\" \
             stroke=\"red\" stroke-width=\"1.5\"/>\n",
            m.x(k),
            m.y(*v)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

//! Route maps as static SVG and GeoJSON documents.
//!
//! Both renderers draw every node of the instance plus the depot, and one
//! polyline per non-empty tugboat route. They need node coordinates, so
//! instances built from explicit travel matrices cannot be drawn.

use std::fmt::Write as _;

use serde_json::json;
use thiserror::Error;

use crate::model::{Instance, NodeKind, Solution};

#[derive(Debug, Error, PartialEq)]
pub enum ReportError {
    #[error("instance has no node coordinates to draw")]
    NoCoordinates,
}

const COLORS: [&str; 6] = ["#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#16a085"];

fn kind_label(inst: &Instance, node: usize) -> &'static str {
    match inst.kind(node) {
        NodeKind::LadenOrigin(_) => "laden-origin",
        NodeKind::LadenDestination(_) => "laden-destination",
        NodeKind::EmptyDestination(_) => "order-destination",
        NodeKind::Barge(_) => "barge",
    }
}

/// Route as a coordinate path: depot, stops in order, depot.
fn route_path(inst: &Instance, coords: &[[f64; 2]], route: &[crate::model::RouteElement]) -> Vec<[f64; 2]> {
    let depot = coords[inst.start_node()];
    let mut path = Vec::with_capacity(route.len() + 2);
    path.push(depot);
    for e in route {
        path.push(coords[e.node]);
    }
    path.push(coords[inst.end_node()]);
    path
}

pub fn render_geojson(inst: &Instance, sol: &Solution) -> Result<String, ReportError> {
    let coords = inst.coordinates().ok_or(ReportError::NoCoordinates)?;
    let mut features = Vec::new();
    features.push(json!({
        "type": "Feature",
        "geometry": {"type": "Point", "coordinates": coords[inst.start_node()]},
        "properties": {"role": "depot"},
    }));
    for node in 0..inst.n_real() {
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": coords[node]},
            "properties": {"role": kind_label(inst, node), "node": node},
        }));
    }
    for (p, route) in sol.routes.iter().enumerate() {
        if route.is_empty() {
            continue;
        }
        let path = route_path(inst, coords, route);
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "LineString", "coordinates": path},
            "properties": {
                "role": "route",
                "tugboat": p,
                "stroke": COLORS[p % COLORS.len()],
                "stops": route.len(),
            },
        }));
    }
    let doc = json!({"type": "FeatureCollection", "features": features});
    Ok(serde_json::to_string_pretty(&doc).expect("geojson serialization cannot fail"))
}

struct Projection {
    min: [f64; 2],
    scale: f64,
    height: f64,
    pad: f64,
}

impl Projection {
    fn fit(coords: &[[f64; 2]], width: f64, height: f64, pad: f64) -> Projection {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for c in coords {
            for a in 0..2 {
                min[a] = min[a].min(c[a]);
                max[a] = max[a].max(c[a]);
            }
        }
        let span = ((max[0] - min[0]).max(1e-9), (max[1] - min[1]).max(1e-9));
        let scale = ((width - 2.0 * pad) / span.0).min((height - 2.0 * pad) / span.1);
        Projection { min, scale, height, pad }
    }

    fn apply(&self, c: [f64; 2]) -> (f64, f64) {
        let x = self.pad + (c[0] - self.min[0]) * self.scale;
        let y = self.height - self.pad - (c[1] - self.min[1]) * self.scale;
        (x, y)
    }
}

pub fn render_svg(inst: &Instance, sol: &Solution) -> Result<String, ReportError> {
    let coords = inst.coordinates().ok_or(ReportError::NoCoordinates)?;
    let (width, height) = (800.0, 600.0);
    let proj = Projection::fit(coords, width, height, 40.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    let _ = writeln!(out, "  <rect width=\"{width}\" height=\"{height}\" fill=\"#fbfaf7\"/>");
    for (p, route) in sol.routes.iter().enumerate() {
        if route.is_empty() {
            continue;
        }
        let color = COLORS[p % COLORS.len()];
        let pts: Vec<String> = route_path(inst, coords, route)
            .into_iter()
            .map(|c| {
                let (x, y) = proj.apply(c);
                format!("{x:.1},{y:.1}")
            })
            .collect();
        let _ = writeln!(
            out,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" opacity=\"0.8\"/>",
            pts.join(" ")
        );
    }
    for node in 0..inst.n_real() {
        let (x, y) = proj.apply(coords[node]);
        let fill = match inst.kind(node) {
            NodeKind::LadenOrigin(_) => "#2c3e50",
            NodeKind::LadenDestination(_) => "#7f8c8d",
            NodeKind::EmptyDestination(_) => "#e67e22",
            NodeKind::Barge(_) => "#95a5a6",
        };
        let _ = writeln!(out, "  <circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"5\" fill=\"{fill}\"/>");
        let _ = writeln!(
            out,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"9\" fill=\"#333\">{node}</text>",
            x + 6.0,
            y - 4.0
        );
    }
    let (dx, dy) = proj.apply(coords[inst.start_node()]);
    let _ = writeln!(
        out,
        "  <rect x=\"{:.1}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"#000\"/>",
        dx - 5.0,
        dy - 5.0
    );
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, Topology};
    use crate::model::RouteElement;
    use crate::testkit;

    #[test]
    fn empty_solution_draws_ports_only() {
        let inst = generate(2, Topology::Inland, 1).unwrap();
        let sol = Solution::unassigned(&inst);
        let geo = render_geojson(&inst, &sol).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&geo).unwrap();
        let features = doc["features"].as_array().unwrap();
        assert_eq!(features.len(), inst.n_real() + 1);
        assert!(features.iter().all(|f| f["geometry"]["type"] == "Point"));
        let svg = render_svg(&inst, &sol).unwrap();
        assert!(!svg.contains("<polyline"));
        assert_eq!(svg.matches("<circle").count(), inst.n_real());
    }

    #[test]
    fn three_routes_draw_three_polylines() {
        let inst = generate(1, Topology::Oceanic, 3).unwrap();
        let mut sol = Solution::unassigned(&inst);
        sol.routes[0] = vec![RouteElement::stop(0), RouteElement::stop(1)];
        sol.routes[1] = vec![RouteElement::stop(2), RouteElement::stop(3)];
        sol.routes[2] = vec![RouteElement::stop(4), RouteElement::stop(5)];
        let svg = render_svg(&inst, &sol).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        let geo = render_geojson(&inst, &sol).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&geo).unwrap();
        let lines: Vec<_> = doc["features"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|f| f["geometry"]["type"] == "LineString")
            .collect();
        assert_eq!(lines.len(), 3);
        // Routes open and close at the depot, in [lon, lat] order.
        let depot = inst.coordinates().unwrap()[inst.start_node()];
        for line in lines {
            let pts = line["geometry"]["coordinates"].as_array().unwrap();
            assert_eq!(pts.first().unwrap()[0].as_f64().unwrap(), depot[0]);
            assert_eq!(pts.last().unwrap()[1].as_f64().unwrap(), depot[1]);
        }
    }

    #[test]
    fn matrix_built_instances_cannot_be_drawn() {
        let inst = testkit::line_instance(1, 0, 0);
        let sol = Solution::unassigned(&inst);
        assert_eq!(render_svg(&inst, &sol), Err(ReportError::NoCoordinates));
        assert_eq!(render_geojson(&inst, &sol), Err(ReportError::NoCoordinates));
    }
}

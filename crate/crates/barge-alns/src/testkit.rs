//! Small instance builders shared by unit and integration tests. Not part
//! of the stable API.
#![doc(hidden)]

use crate::model::{
    EmptyBarge, EmptyOrder, Instance, LadenOrder, Params, RawInstance, Tugboat, Window,
};

/// Raw instance with all real nodes spread on a line, explicit matrices and
/// two identical tugboats. Node `i` sits at `x = 10 * (i + 1)`; both depot
/// nodes sit at `x = 0`. Travel time is `|dx| / 10` hours and distance is
/// `|dx|` km, so a hop between adjacent nodes costs one hour. Windows are
/// wide open, every empty-barge order wants a single barge and cost rates
/// are one per hour and zero per km.
pub fn raw_line_instance(f: usize, e: usize, b: usize) -> RawInstance {
    let n_real = 2 * f + e + b;
    let wide = Window(0.0, 1000.0);
    let orders_f = (0..f)
        .map(|k| LadenOrder {
            origin: 2 * k,
            destination: 2 * k + 1,
            origin_window: wide,
            destination_window: wide,
        })
        .collect();
    let orders_e = (0..e)
        .map(|m| EmptyOrder {
            destination: 2 * f + m,
            required_barges: 1,
            window: wide,
        })
        .collect();
    let barges = (0..b)
        .map(|i| EmptyBarge {
            node: 2 * f + e + i,
            idle_until: 0.0,
            window: wide,
        })
        .collect();
    let positions: Vec<f64> = (0..n_real)
        .map(|i| 10.0 * (i + 1) as f64)
        .chain([0.0, 0.0])
        .collect();
    let time_rows: Vec<Vec<f64>> = positions
        .iter()
        .map(|&xi| positions.iter().map(|&xj| (xi - xj).abs() / 10.0).collect())
        .collect();
    let dist_rows: Vec<Vec<f64>> = positions
        .iter()
        .map(|&xi| positions.iter().map(|&xj| (xi - xj).abs()).collect())
        .collect();
    let mut raw = raw_without_network(f, e, b, orders_f, orders_e, barges);
    raw.set_network_matrices(time_rows, dist_rows);
    raw
}

fn raw_without_network(
    _f: usize,
    _e: usize,
    _b: usize,
    orders_f: Vec<LadenOrder>,
    orders_e: Vec<EmptyOrder>,
    barges: Vec<EmptyBarge>,
) -> RawInstance {
    RawInstance::new(
        Params {
            capacity: 5,
            speed: 20.0,
            penalties: Default::default(),
        },
        vec![
            Tugboat {
                max_working_time: 1000.0,
                cost_per_time: 1.0,
                cost_per_distance: 0.0,
            };
            2
        ],
        orders_f,
        orders_e,
        barges,
    )
}

/// The default line-geometry travel-time rows for a raw instance built by
/// [`raw_line_instance`], for tests that want to perturb single entries.
pub fn raw_time_rows(raw: &RawInstance) -> Vec<Vec<f64>> {
    let n = 2 * raw.orders_f.len() + raw.orders_e.len() + raw.barges.len() + 2;
    let positions: Vec<f64> = (0..n - 2)
        .map(|i| 10.0 * (i + 1) as f64)
        .chain([0.0, 0.0])
        .collect();
    positions
        .iter()
        .map(|&xi| positions.iter().map(|&xj| (xi - xj).abs() / 10.0).collect())
        .collect()
}

pub fn set_matrices(raw: &mut RawInstance, time: Vec<Vec<f64>>, distance: Vec<Vec<f64>>) {
    raw.set_network_matrices(time, distance);
}

pub fn line_instance(f: usize, e: usize, b: usize) -> Instance {
    Instance::build(raw_line_instance(f, e, b)).expect("line instance is consistent")
}

/// Conservation of work across routes and pools: every laden order either
/// fully routed or pooled, every barge in exactly one place, and delivered
/// plus outstanding barges matching each empty-barge order's demand.
pub fn conserved(inst: &Instance, sol: &crate::model::Solution) -> bool {
    let count_node = |node| {
        sol.routes
            .iter()
            .flatten()
            .filter(|el| el.node == node)
            .count()
    };
    for (j, order) in inst.laden.iter().enumerate() {
        let routed = count_node(order.origin) == 1 && count_node(order.destination) == 1;
        let gone = count_node(order.origin) == 0 && count_node(order.destination) == 0;
        let pooled = sol.pool_laden.contains(&j);
        if !(routed && !pooled || gone && pooled) {
            return false;
        }
    }
    for barge in &inst.barges {
        let pooled = sol.pool_barges.iter().filter(|&&n| n == barge.node).count();
        if count_node(barge.node) + pooled != 1 {
            return false;
        }
    }
    let delivered = crate::validate::delivered_per_order(inst, sol);
    for (m, order) in inst.empty.iter().enumerate() {
        let outstanding: u32 = sol
            .pool_empty
            .iter()
            .filter(|&&(k, _)| k == m)
            .map(|&(_, c)| c)
            .sum();
        if delivered[m] + outstanding != order.required_barges {
            return false;
        }
    }
    true
}

//! Seeded benchmark-instance generator.
//!
//! Six scale presets per topology, from small (around a dozen laden orders)
//! to extra large. The oceanic topology spreads eight ports along a coastal
//! arc roughly 1500 km long; the inland topology chains seven river ports
//! over about 500 km. Port zero is virtual and only hosts the depot, so
//! orders connect the remaining ports.
//!
//! The output is a pure function of (row, topology, seed); the same call
//! yields a byte-identical instance file.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{
    EmptyBarge, EmptyOrder, Instance, InstanceError, LadenOrder, Params, RawInstance, Tugboat,
    Window,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    Oceanic,
    Inland,
}

impl Topology {
    pub fn label(self) -> &'static str {
        match self {
            Topology::Oceanic => "oceanic",
            Topology::Inland => "inland",
        }
    }

    pub fn parse(text: &str) -> Option<Topology> {
        match text {
            "oceanic" => Some(Topology::Oceanic),
            "inland" => Some(Topology::Inland),
            _ => None,
        }
    }

    /// Synthetic port coordinates as [lon, lat]; index 0 is the virtual
    /// depot port.
    pub fn ports(self) -> &'static [[f64; 2]] {
        match self {
            Topology::Oceanic => &OCEANIC_PORTS,
            Topology::Inland => &INLAND_PORTS,
        }
    }

    fn speed(self) -> f64 {
        match self {
            Topology::Oceanic => 30.0,
            Topology::Inland => 20.0,
        }
    }
}

/// Coastal arc from a northern gulf down to an island group.
static OCEANIC_PORTS: [[f64; 2]; 8] = [
    [121.00, 34.50],
    [117.75, 38.98],
    [118.55, 39.10],
    [121.40, 37.55],
    [120.35, 36.08],
    [119.55, 35.40],
    [121.50, 31.25],
    [122.20, 29.95],
];

/// River chain running upstream from the depot.
static INLAND_PORTS: [[f64; 2]; 7] = [
    [118.90, 32.15],
    [118.75, 32.05],
    [118.42, 31.58],
    [118.18, 31.08],
    [117.42, 30.62],
    [116.40, 30.15],
    [114.95, 29.15],
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleRow {
    pub laden: usize,
    pub empty: usize,
    pub barges: usize,
    /// Planning horizon in hours; also the working-time limit.
    pub horizon: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("unknown preset row {0}; rows run from 1 to 6")]
    UnknownPreset(u8),
}

/// Order counts and barge supply per benchmark row. The two topologies
/// share rows 1 to 5 and differ in the extra-large row.
pub fn preset(row: u8, topology: Topology) -> Result<ScaleRow, GenerateError> {
    let (laden, empty, barges, horizon) = match (row, topology) {
        (1, _) => (13, 1, 8, 336.0),
        (2, _) => (8, 1, 10, 336.0),
        (3, _) => (5, 2, 12, 336.0),
        (4, _) => (15, 2, 11, 420.0),
        (5, _) => (20, 4, 5, 504.0),
        (6, Topology::Oceanic) => (30, 6, 6, 720.0),
        (6, Topology::Inland) => (30, 4, 9, 720.0),
        _ => return Err(GenerateError::UnknownPreset(row)),
    };
    Ok(ScaleRow { laden, empty, barges, horizon })
}

pub fn generate(row: u8, topology: Topology, seed: u64) -> Result<Instance, GenerateError> {
    let scale = preset(row, topology)?;
    let raw = generate_raw(scale, topology, seed);
    Ok(Instance::build(raw).expect("generated instances are always consistent"))
}

fn generate_raw(scale: ScaleRow, topology: Topology, seed: u64) -> RawInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ports = topology.ports();
    let h = scale.horizon;
    let mut coords: Vec<[f64; 2]> = Vec::new();
    let draw_port = |rng: &mut ChaCha8Rng| rng.gen_range(1..ports.len());

    let window = |rng: &mut ChaCha8Rng| {
        let open = rng.gen_range(0.0..0.05 * h);
        let close = rng.gen_range(0.7 * h..h);
        Window(open, close)
    };

    let mut orders_f = Vec::with_capacity(scale.laden);
    for k in 0..scale.laden {
        let origin = draw_port(&mut rng);
        let mut destination = draw_port(&mut rng);
        while destination == origin {
            destination = draw_port(&mut rng);
        }
        let origin_window = window(&mut rng);
        let destination_window = window(&mut rng);
        coords.push(ports[origin]);
        coords.push(ports[destination]);
        orders_f.push(LadenOrder {
            origin: 2 * k,
            destination: 2 * k + 1,
            origin_window,
            destination_window,
        });
    }

    // Supply always covers demand: each order asks for at most an even
    // share of the generated barges.
    let share = (scale.barges / scale.empty.max(1)).max(1) as u32;
    let mut orders_e = Vec::with_capacity(scale.empty);
    for m in 0..scale.empty {
        let destination_port = draw_port(&mut rng);
        coords.push(ports[destination_port]);
        orders_e.push(EmptyOrder {
            destination: 2 * scale.laden + m,
            required_barges: rng.gen_range(1..=share),
            window: window(&mut rng),
        });
    }

    let mut barges = Vec::with_capacity(scale.barges);
    for i in 0..scale.barges {
        let port = draw_port(&mut rng);
        coords.push(ports[port]);
        barges.push(EmptyBarge {
            node: 2 * scale.laden + scale.empty + i,
            idle_until: rng.gen_range(0.0..0.1 * h),
            window: Window(0.0, h),
        });
    }

    coords.push(ports[0]);
    coords.push(ports[0]);

    let tugboats = vec![
        Tugboat {
            max_working_time: h,
            cost_per_time: 100.0,
            cost_per_distance: 1.0,
        };
        3
    ];
    let params = Params {
        capacity: 5,
        speed: topology.speed(),
        ..Params::default()
    };
    let mut raw = RawInstance::new(params, tugboats, orders_f, orders_e, barges);
    raw.set_network_coordinates(coords);
    raw
}

/// Convenience wrapper that reports instance-construction problems instead
/// of panicking; generated data never triggers them, but callers feeding
/// edited presets may want the error.
pub fn try_generate(
    row: u8,
    topology: Topology,
    seed: u64,
) -> Result<Result<Instance, InstanceError>, GenerateError> {
    let scale = preset(row, topology)?;
    Ok(Instance::build(generate_raw(scale, topology, seed)))
}

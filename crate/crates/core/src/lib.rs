//! Privacy-aware receive scaling for over-the-air federated learning.
//!
//! The crate simulates a server that aggregates device gradients over a
//! shared fading channel and chooses, every round, how much to scale the
//! received signal. A larger scaling factor suppresses receiver noise, which
//! helps convergence but leaks more about each device's data. The modules
//! cover the privacy accountant, the channel model, the online controller and
//! its comparison methods, a synthetic trainer, and the experiment harness
//! that certifies the controller's guarantees.

pub mod accountant;
pub mod baselines;
pub mod channel;
pub mod controller;
pub mod error;
pub mod experiment;
pub mod fl_sim;
pub mod io;
pub mod rng;
pub mod roots;
pub mod system;

pub use accountant::{
    best_dp_over_orders, rdp_of_sgm, rdp_to_dp, DpGuarantee, PrivacyLedger, RdpOrder, SgmCurve, SgmParams,
};
pub use channel::{
    cost_hata_path_loss, dbm_to_watts, expected_h_min_sq, generate_trace, place_devices, ChannelTrace, DeviceProfile,
};
pub use controller::{
    run_adascale, solve_round, ControllerConfig, ControllerState, RoundDecision, RoundObjective, Tolerance, Trajectory,
};
pub use error::{Error, Result};
pub use system::{eta_from_channels, eta_from_x, NoiseSpec, SystemModel};

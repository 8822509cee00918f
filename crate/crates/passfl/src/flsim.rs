//! FL simulator.

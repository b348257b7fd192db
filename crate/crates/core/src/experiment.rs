//! Channel families, capacity kinds and the assembly of a fixed-control
//! supermap channel for one `(configuration, family, p)` point.

use std::fmt;
use std::str::FromStr;

use crate::channels::{bit_flip, depolarizing, phase_flip, vacuum_extend, Channel, VacuumAmplitudes};
use crate::error::{Error, Result};
use crate::infotheory::{classical_capacity, quantum_capacity, CapacityResult, Encoding, OptimizerConfig};
use crate::supermaps::{
    coh_of_coh, coh_of_switch, coherent_superposition, fix_control, switch, switch_of_coh,
    switch_of_switch, trace_out_control, ControlState, SupermapKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    BitFlip,
    PhaseFlip,
    /// bit, phase, bit, phase
    MixedAlternating,
    /// bit, bit, phase, phase
    MixedBlock,
    Depolarizing,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::BitFlip,
        Family::PhaseFlip,
        Family::MixedAlternating,
        Family::MixedBlock,
        Family::Depolarizing,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Family::BitFlip => "bitflip",
            Family::PhaseFlip => "phaseflip",
            Family::MixedAlternating => "mixed_alt",
            Family::MixedBlock => "mixed_block",
            Family::Depolarizing => "depolarizing",
        }
    }

    /// The four channel slots at noise level `p`. Two-slot supermaps use the first two.
    pub fn channels(self, p: f64) -> Result<[Channel; 4]> {
        let bit = || bit_flip(p);
        let phase = || phase_flip(p);
        Ok(match self {
            Family::BitFlip => [bit()?, bit()?, bit()?, bit()?],
            Family::PhaseFlip => [phase()?, phase()?, phase()?, phase()?],
            Family::MixedAlternating => [bit()?, phase()?, bit()?, phase()?],
            Family::MixedBlock => [bit()?, bit()?, phase()?, phase()?],
            Family::Depolarizing => {
                let d = depolarizing(p)?;
                [d.clone(), d.clone(), d.clone(), d]
            }
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| Error::UnknownToken(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CapacityType {
    Classical,
    Quantum,
}

impl CapacityType {
    pub const ALL: [CapacityType; 2] = [CapacityType::Classical, CapacityType::Quantum];

    pub fn token(self) -> &'static str {
        match self {
            CapacityType::Classical => "classical",
            CapacityType::Quantum => "quantum",
        }
    }
}

impl fmt::Display for CapacityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for CapacityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CapacityType::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| Error::UnknownToken(s.to_string()))
    }
}

/// What the receiver of classical information gets to measure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ClassicalReadout {
    /// Control registers are discarded and bits are encoded in `{|0⟩, |1⟩}`
    /// with an optimized prior.
    #[default]
    TargetBasis,
    /// Full output including the control, with ensembles chosen by the
    /// optimizer's [`Encoding`].
    FullHolevo,
}

/// One evaluation point.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub configuration: SupermapKind,
    pub family: Family,
    pub p: f64,
    /// Vacuum amplitudes for every base channel; concentrated when absent.
    pub amplitudes: Option<VacuumAmplitudes>,
}

impl Scenario {
    pub fn new(configuration: SupermapKind, family: Family, p: f64) -> Self {
        Self {
            configuration,
            family,
            p,
            amplitudes: None,
        }
    }

    pub fn with_amplitudes(mut self, amps: VacuumAmplitudes) -> Self {
        self.amplitudes = Some(amps);
        self
    }

    /// Supermap channel on `control ⊗ target`.
    pub fn supermap(&self) -> Result<Channel> {
        let [e1, e2, e3, e4] = self.family.channels(self.p)?;
        let ext = |e: &Channel| {
            let amps = self
                .amplitudes
                .clone()
                .unwrap_or_else(|| VacuumAmplitudes::concentrated(e.kraus_count()));
            vacuum_extend(e, &amps)
        };
        let outer = |n: usize| VacuumAmplitudes::concentrated(n * n);
        match self.configuration {
            SupermapKind::Switch => switch(&e1, &e2),
            SupermapKind::CoherentSup => coherent_superposition(&ext(&e1)?, &ext(&e2)?),
            SupermapKind::SwitchOfSwitch => switch_of_switch(&e1, &e2, &e3, &e4),
            SupermapKind::SwitchOfCoh => {
                switch_of_coh(&ext(&e1)?, &ext(&e2)?, &ext(&e3)?, &ext(&e4)?)
            }
            SupermapKind::CohOfSwitch => coh_of_switch(
                &e1,
                &e2,
                &e3,
                &e4,
                &outer(e1.kraus_count()),
                &outer(e3.kraus_count()),
            ),
            SupermapKind::CohOfCoh => coh_of_coh(
                &ext(&e1)?,
                &ext(&e2)?,
                &ext(&e3)?,
                &ext(&e4)?,
                &outer(e1.kraus_count()),
                &outer(e3.kraus_count()),
            ),
        }
    }

    /// Target-to-full-output channel with the control fixed at `|+⟩` per qubit.
    pub fn fixed_channel(&self) -> Result<Channel> {
        fix_control(&self.supermap()?, &ControlState::default_for(self.configuration))
    }

    /// Target-to-target channel with the control registers discarded.
    pub fn target_channel(&self) -> Result<Channel> {
        let dc = 1 << self.configuration.control_qubits();
        trace_out_control(&self.fixed_channel()?, dc)
    }

    pub fn capacity(
        &self,
        capacity: CapacityType,
        readout: ClassicalReadout,
        cfg: &OptimizerConfig,
    ) -> Result<CapacityResult> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Domain(format!("p must lie in [0, 1], got {}", self.p)));
        }
        match (capacity, readout) {
            (CapacityType::Quantum, _) => quantum_capacity(&self.fixed_channel()?, cfg),
            (CapacityType::Classical, ClassicalReadout::FullHolevo) => {
                classical_capacity(&self.fixed_channel()?, cfg)
            }
            (CapacityType::Classical, ClassicalReadout::TargetBasis) => {
                let cfg = OptimizerConfig {
                    encoding: Encoding::ComputationalBasis,
                    ..*cfg
                };
                classical_capacity(&self.target_channel()?, &cfg)
            }
        }
    }
}

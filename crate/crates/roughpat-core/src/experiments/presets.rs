//! Reaction presets and the animal-coat preset registry.

use crate::pde::RdsParams;

/// Which steady pattern the reaction constants produce on a flat domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReactionPattern {
    Spots,
    Stripes,
}

impl ReactionPattern {
    pub fn params(&self) -> RdsParams {
        match self {
            ReactionPattern::Spots => RdsParams::spots(),
            ReactionPattern::Stripes => RdsParams::stripes(),
        }
    }

    /// Final time used by the reference pattern runs.
    pub fn default_t_end(&self) -> f64 {
        match self {
            ReactionPattern::Spots => 800.0,
            ReactionPattern::Stripes => 4000.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ReactionPattern::Spots => "spots",
            ReactionPattern::Stripes => "stripes",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "spots" => Some(ReactionPattern::Spots),
            "stripes" => Some(ReactionPattern::Stripes),
            _ => None,
        }
    }
}

/// How the rough surface of a run is constructed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceRecipe {
    /// Analytic wave superposition with frequency cutoffs (M, N).
    Wave { max_freq_x: u32, max_freq_y: u32 },
    /// Heat-filtered nodal noise with weight kappa, diagonal tensor
    /// diag(f11, f22), and J filter steps.
    Filtered { kappa: f64, f11: f64, f22: f64, steps: usize },
}

impl SurfaceRecipe {
    pub fn method_tag(&self) -> &'static str {
        match self {
            SurfaceRecipe::Wave { .. } => "M",
            SurfaceRecipe::Filtered { .. } => "S",
        }
    }
}

/// One animal-coat configuration: surface construction, reaction preset,
/// and solver parameters at paper scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnimalPreset {
    pub name: &'static str,
    pub surface: SurfaceRecipe,
    pub pattern: ReactionPattern,
    /// Nodes per axis at full scale; desk-scale runs halve this.
    pub nodes_per_axis: usize,
    pub tau: f64,
    pub t_end: f64,
    pub amplitude: f64,
    pub half_width: f64,
}

impl AnimalPreset {
    /// Nodes per axis for the given scale.
    pub fn nodes(&self, desk_scale: bool) -> usize {
        if desk_scale {
            self.nodes_per_axis / 2
        } else {
            self.nodes_per_axis
        }
    }
}

/// The stripe morphologies (angelfish, plecostomus) use the stripe reaction
/// preset; the spotted coats (genet, cheetah) use the spot preset.
pub fn animal_presets() -> &'static [AnimalPreset] {
    const PRESETS: &[AnimalPreset] = &[
        AnimalPreset {
            name: "emperor-angelfish-m",
            surface: SurfaceRecipe::Wave { max_freq_x: 5, max_freq_y: 5 },
            pattern: ReactionPattern::Stripes,
            nodes_per_axis: 90,
            tau: 0.5,
            t_end: 4000.0,
            amplitude: 0.05,
            half_width: 1.0,
        },
        AnimalPreset {
            name: "genet-m",
            surface: SurfaceRecipe::Wave { max_freq_x: 15, max_freq_y: 15 },
            pattern: ReactionPattern::Spots,
            nodes_per_axis: 90,
            tau: 0.5,
            t_end: 800.0,
            amplitude: 0.1,
            half_width: 1.0,
        },
        AnimalPreset {
            name: "plecostomus-m",
            surface: SurfaceRecipe::Wave { max_freq_x: 15, max_freq_y: 5 },
            pattern: ReactionPattern::Stripes,
            nodes_per_axis: 90,
            tau: 0.5,
            t_end: 4000.0,
            amplitude: 0.1,
            half_width: 1.0,
        },
        AnimalPreset {
            name: "cheetah-m",
            surface: SurfaceRecipe::Wave { max_freq_x: 15, max_freq_y: 5 },
            pattern: ReactionPattern::Spots,
            nodes_per_axis: 90,
            tau: 0.5,
            t_end: 800.0,
            amplitude: 0.1,
            half_width: 1.0,
        },
        AnimalPreset {
            name: "emperor-angelfish-s",
            surface: SurfaceRecipe::Filtered { kappa: 5.0, f11: 1.0, f22: 1.0, steps: 15 },
            pattern: ReactionPattern::Stripes,
            nodes_per_axis: 90,
            tau: 0.5,
            t_end: 400.0,
            amplitude: 0.05,
            half_width: 1.0,
        },
        AnimalPreset {
            name: "genet-s",
            surface: SurfaceRecipe::Filtered { kappa: 8.0, f11: 1.0, f22: 0.01, steps: 10 },
            pattern: ReactionPattern::Spots,
            nodes_per_axis: 90,
            tau: 0.5,
            t_end: 800.0,
            amplitude: 0.1,
            half_width: 1.0,
        },
        AnimalPreset {
            name: "plecostomus-s",
            surface: SurfaceRecipe::Filtered { kappa: 8.0, f11: 1.0, f22: 0.01, steps: 10 },
            pattern: ReactionPattern::Stripes,
            nodes_per_axis: 90,
            tau: 0.5,
            t_end: 3000.0,
            amplitude: 0.1,
            half_width: 1.0,
        },
        AnimalPreset {
            name: "cheetah-s",
            surface: SurfaceRecipe::Filtered { kappa: 0.2, f11: 20.0, f22: 20.0, steps: 2 },
            pattern: ReactionPattern::Spots,
            nodes_per_axis: 90,
            tau: 0.5,
            t_end: 400.0,
            amplitude: 0.05,
            half_width: 1.0,
        },
    ];
    PRESETS
}

pub fn find_animal_preset(name: &str) -> Option<&'static AnimalPreset> {
    animal_presets().iter().find(|p| p.name == name)
}

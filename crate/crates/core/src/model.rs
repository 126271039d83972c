//! Physical constants, host-crystal parameters, dot geometry and temperature.
//!
//! Every dimensional symbol used by the rate routes lives here. All values are
//! SI unless a name says otherwise.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use crate::error::{require_finite, require_non_negative, require_positive, Error, Result};

/// CODATA 2018 constants, compiled in so results are bit-reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Elementary charge, C.
    pub e_charge: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
}

pub const CODATA: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    k_b: 1.380_649e-23,
    e_charge: 1.602_176_634e-19,
    eps0: 8.854_187_812_8e-12,
};

/// LO/LA phonon and dielectric parameters of the host crystal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// LO phonon angular frequency, rad/s.
    pub omega_lo: f64,
    /// LO phonon lifetime, s.
    pub tau0: f64,
    /// LA sound velocity, m/s.
    pub c_sound: f64,
    /// Debye wavevector, 1/m.
    pub k_debye: f64,
    /// Lattice part of the relative dielectric constant.
    pub eps_lattice: f64,
}

impl MaterialParams {
    pub fn gaas() -> Self {
        MaterialParams {
            omega_lo: 5.4e13,
            tau0: 9.2e-12,
            c_sound: 5150.0,
            k_debye: 1.1e10,
            eps_lattice: 70.0,
        }
    }

    pub fn new(omega_lo: f64, tau0: f64, c_sound: f64, k_debye: f64, eps_lattice: f64) -> Result<Self> {
        let m = MaterialParams {
            omega_lo,
            tau0,
            c_sound,
            k_debye,
            eps_lattice,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("Omega_rad_per_s", self.omega_lo)?;
        require_positive("tau0_s", self.tau0)?;
        require_positive("c_sound_m_per_s", self.c_sound)?;
        require_positive("k_D_per_m", self.k_debye)?;
        require_positive("eps_lattice", self.eps_lattice)?;
        Ok(())
    }

    /// Parses a `key = value` material file. Keys that are absent keep their
    /// GaAs default; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = MaterialParams::gaas();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                reason: format!("value for `{key}` is not a number: `{}`", value.trim()),
            })?;
            let slot = match key {
                "Omega_rad_per_s" => &mut m.omega_lo,
                "tau0_s" => &mut m.tau0,
                "c_sound_m_per_s" => &mut m.c_sound,
                "k_D_per_m" => &mut m.k_debye,
                "eps_lattice" => &mut m.eps_lattice,
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: format!("unknown key `{other}`"),
                    })
                }
            };
            *slot = value;
        }
        m.validate()?;
        Ok(m)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Renders the parameters in the material file format.
    pub fn to_file_string(&self) -> String {
        format!(
            "Omega_rad_per_s = {:e}\ntau0_s = {:e}\nc_sound_m_per_s = {:e}\nk_D_per_m = {:e}\neps_lattice = {:e}\n",
            self.omega_lo, self.tau0, self.c_sound, self.k_debye, self.eps_lattice
        )
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self::gaas()
    }
}

/// Gaussian wavefunction size and dot separation along z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DotGeometry {
    /// Wavefunction size L, m.
    pub size: f64,
    /// Dot separation D, m.
    pub separation: f64,
}

impl DotGeometry {
    pub fn new(size: f64, separation: f64) -> Result<Self> {
        require_positive("L", size)?;
        require_non_negative("D", separation)?;
        Ok(DotGeometry { size, separation })
    }

    pub fn with_separation(self, separation: f64) -> Result<Self> {
        Self::new(self.size, separation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalEnv {
    /// Temperature, K. Zero is legal and means an empty phonon bath.
    pub temperature: f64,
}

impl ThermalEnv {
    pub fn new(temperature: f64) -> Result<Self> {
        require_non_negative("T", temperature)?;
        Ok(ThermalEnv { temperature })
    }
}

/// Dimensionless parameters of the closed-form rate integral plus its rate
/// prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateIntegralParams {
    /// √2·D/L.
    pub alpha: f64,
    /// ħ·c·k_D/(k_B·T).
    pub x_debye: f64,
    /// k_D·L.
    pub kdl: f64,
    /// (64/π²)·e²(k_BT)⁵/(τ₀ħ⁶Ω⁵ε₀ε̃c), 1/s.
    pub prefactor: f64,
}

impl RateIntegralParams {
    /// Upper limit of the finite-range integrals, √2·k_D·L.
    pub fn debye_limit(&self) -> f64 {
        SQRT_2 * self.kdl
    }
}

fn check_inputs(m: &MaterialParams, g: &DotGeometry, env: &ThermalEnv) -> Result<()> {
    m.validate()?;
    require_positive("L", g.size)?;
    require_non_negative("D", g.separation)?;
    require_finite("T", env.temperature)?;
    Ok(())
}

/// Dimensionless scales of the rate integral. T = 0 is rejected because
/// x_D diverges there; the rate routes short-circuit that case themselves.
pub fn derived_scales(m: &MaterialParams, g: &DotGeometry, env: &ThermalEnv) -> Result<RateIntegralParams> {
    check_inputs(m, g, env)?;
    require_positive("T", env.temperature)?;
    let c = CODATA;
    let kt = c.k_b * env.temperature;
    Ok(RateIntegralParams {
        alpha: SQRT_2 * g.separation / g.size,
        x_debye: c.hbar * m.c_sound * m.k_debye / kt,
        kdl: m.k_debye * g.size,
        prefactor: rate_prefactor(m, env.temperature),
    })
}

/// Rate prefactor grouped as a rate × dimensionless coupling × thermal ratio
/// to keep every intermediate well inside the f64 exponent range.
pub fn rate_prefactor(m: &MaterialParams, temperature: f64) -> f64 {
    let c = CODATA;
    let coupling = c.e_charge * c.e_charge / (c.eps0 * m.eps_lattice * c.hbar * m.c_sound);
    let thermal = c.k_b * temperature / (c.hbar * m.omega_lo);
    64.0 / (PI * PI) / m.tau0 * coupling * thermal.powi(5)
}

/// The same prefactor multiplied out term by term.
pub fn rate_prefactor_literal(m: &MaterialParams, temperature: f64) -> f64 {
    let c = CODATA;
    let kt = c.k_b * temperature;
    64.0 / (PI * PI) * c.e_charge.powi(2) * kt.powi(5)
        / (m.tau0 * c.hbar.powi(6) * m.omega_lo.powi(5) * c.eps0 * m.eps_lattice * m.c_sound)
}

/// Squared anharmonic coupling strength w₀² = 64πħ²c⁵/(τ₀Ω⁴), J²·m⁵.
pub fn anharmonic_strength_sq(m: &MaterialParams) -> f64 {
    64.0 * PI * CODATA.hbar.powi(2) * m.c_sound.powi(5) / (m.tau0 * m.omega_lo.powi(4))
}

/// Evaluates the rate prefactor in (meV, ps, nm) units and converts the
/// result back to 1/s. Used as a dimensional audit of the SI path.
pub fn rate_prefactor_internal_units(m: &MaterialParams, temperature: f64) -> f64 {
    const MEV: f64 = 1.602_176_634e-22; // J
    const PS: f64 = 1e-12; // s
    const NM: f64 = 1e-9; // m
    let c = CODATA;
    let hbar = c.hbar / (MEV * PS); // meV·ps
    let k_b = c.k_b / MEV; // meV/K
    let e2_over_eps0 = c.e_charge * c.e_charge / c.eps0 / (MEV * NM); // meV·nm
    let c_sound = m.c_sound * PS / NM; // nm/ps
    let omega = m.omega_lo * PS; // 1/ps
    let tau0 = m.tau0 / PS; // ps
    let kt = k_b * temperature;
    let per_ps = 64.0 / (PI * PI) * e2_over_eps0 * kt.powi(5)
        / (tau0 * hbar.powi(6) * omega.powi(5) * m.eps_lattice * c_sound);
    per_ps / PS
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_rel(a: f64, b: f64, tol: f64) -> bool {
        ((a - b) / b).abs() <= tol
    }

    #[test]
    fn x_debye_at_100k() {
        let p = derived_scales(
            &MaterialParams::gaas(),
            &DotGeometry::new(4e-9, 1e-8).unwrap(),
            &ThermalEnv::new(100.0).unwrap(),
        )
        .unwrap();
        // hand arithmetic: 1.054571817e-34 * 5150 * 1.1e10 / (1.380649e-23 * 100)
        assert!(approx_rel(p.x_debye, 4.327_058_755_197_737, 1e-14));
    }

    #[test]
    fn alpha_definition() {
        let m = MaterialParams::gaas();
        let env = ThermalEnv::new(50.0).unwrap();
        let p = derived_scales(&m, &DotGeometry::new(4e-9, 4e-9).unwrap(), &env).unwrap();
        assert!((p.alpha - SQRT_2).abs() < 1e-15);
        let p0 = derived_scales(&m, &DotGeometry::new(4e-9, 0.0).unwrap(), &env).unwrap();
        assert_eq!(p0.alpha, 0.0);
    }

    #[test]
    fn zero_temperature_rejected() {
        let err = derived_scales(
            &MaterialParams::gaas(),
            &DotGeometry::new(4e-9, 1e-8).unwrap(),
            &ThermalEnv { temperature: 0.0 },
        );
        assert!(matches!(err, Err(Error::InvalidParameter { name: "T", .. })));
    }

    #[test]
    fn non_finite_inputs_rejected() {
        let m = MaterialParams::gaas();
        let g = DotGeometry { size: 4e-9, separation: f64::NAN };
        assert!(derived_scales(&m, &g, &ThermalEnv { temperature: 10.0 }).is_err());
        let g = DotGeometry::new(4e-9, 1e-8).unwrap();
        assert!(derived_scales(&m, &g, &ThermalEnv { temperature: f64::INFINITY }).is_err());
        assert!(MaterialParams::new(f64::NAN, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(DotGeometry::new(0.0, 1.0).is_err());
    }

    #[test]
    fn x_debye_homogeneous_in_temperature() {
        let m = MaterialParams::gaas();
        let g = DotGeometry::new(4e-9, 1e-8).unwrap();
        for t in [0.5, 3.0, 17.0, 300.0] {
            let a = derived_scales(&m, &g, &ThermalEnv::new(t).unwrap()).unwrap();
            let b = derived_scales(&m, &g, &ThermalEnv::new(2.0 * t).unwrap()).unwrap();
            assert_eq!(b.x_debye, a.x_debye / 2.0);
        }
    }

    #[test]
    fn anharmonic_strength_gaas() {
        // independent evaluation at 30 digits gives 1.03551274104784505e-91
        let w = anharmonic_strength_sq(&MaterialParams::gaas());
        assert!(approx_rel(w, 1.035_512_741_047_845e-91, 1e-13));
    }

    #[test]
    fn anharmonic_strength_scaling() {
        let m = MaterialParams::gaas();
        let base = anharmonic_strength_sq(&m);
        let doubled_tau = MaterialParams { tau0: 2.0 * m.tau0, ..m };
        assert!(approx_rel(anharmonic_strength_sq(&doubled_tau), base / 2.0, 1e-15));
        let s = 1.37;
        let faster = MaterialParams { c_sound: s * m.c_sound, ..m };
        assert!(approx_rel(anharmonic_strength_sq(&faster), base * s.powi(5), 1e-14));
    }

    #[test]
    fn prefactor_groupings_agree() {
        let m = MaterialParams::gaas();
        for t in [0.01, 1.0, 20.0, 100.0, 300.0, 1000.0] {
            let a = rate_prefactor(&m, t);
            let b = rate_prefactor_literal(&m, t);
            let c = rate_prefactor_internal_units(&m, t);
            assert!(approx_rel(a, b, 1e-12), "T={t}: {a} vs {b}");
            assert!(approx_rel(a, c, 1e-10), "T={t}: {a} vs {c}");
        }
    }

    #[test]
    fn material_file_defaults_and_overrides() {
        let m = MaterialParams::parse("# custom\ntau0_s = 4.6e-12  # halved\n\neps_lattice=35\n").unwrap();
        assert_eq!(m.tau0, 4.6e-12);
        assert_eq!(m.eps_lattice, 35.0);
        assert_eq!(m.c_sound, 5150.0);
        assert_eq!(MaterialParams::parse("").unwrap(), MaterialParams::gaas());
        let again = MaterialParams::parse(&m.to_file_string()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn material_file_errors() {
        assert!(matches!(
            MaterialParams::parse("tau0_s = -1e-12"),
            Err(Error::InvalidParameter { name: "tau0_s", .. })
        ));
        assert!(matches!(MaterialParams::parse("bogus = 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(MaterialParams::parse("\ntau0_s 3"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(MaterialParams::parse("tau0_s = fast"), Err(Error::Parse { .. })));
    }
}

//! Channel and antenna primitives: LOS blockage, path loss, the two-point
//! directivity gain distribution under beamsteering error, Nakagami power
//! fading and its Alzer CDF approximation, and the full system configuration.
//!
//! All quantities are linear (powers in mW, gains as ratios, angles in
//! radians). dB conversion happens at the boundary via [`db_to_linear`].

use rand_core::RngCore;

use crate::error::{domain, Result};
use crate::quad::{self, Tolerance};
use crate::sampling::GammaSampler;
use crate::specfun;

/// `10^(x/10)`; converts dB and dBm (to mW) alike.
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// `10 log10(x)`.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

/// Blockage state of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkState {
    /// Line of sight.
    Los,
    /// Non line of sight.
    Nlos,
}

/// Sectored antenna pattern of one array, with its beamsteering error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    /// Main-lobe power gain `M`.
    pub main_gain: f64,
    /// Side-lobe power gain `m`.
    pub side_gain: f64,
    /// Main-lobe beamwidth in radians.
    pub beamwidth: f64,
    /// Standard deviation of the zero-mean Gaussian steering error, radians.
    pub steer_sigma: f64,
}

impl AntennaPattern {
    /// Validated pattern.
    pub fn new(main_gain: f64, side_gain: f64, beamwidth: f64, steer_sigma: f64) -> Result<Self> {
        let p = Self { main_gain, side_gain, beamwidth, steer_sigma };
        p.validate()?;
        Ok(p)
    }

    /// Checks `M > m > 0`, `0 < θ < 2π`, `Δ ≥ 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.side_gain > 0.0 && self.side_gain.is_finite()) {
            return Err(domain("side-lobe gain", self.side_gain));
        }
        if !(self.main_gain > self.side_gain && self.main_gain.is_finite()) {
            return Err(domain("main-lobe gain", self.main_gain));
        }
        if !(self.beamwidth > 0.0 && self.beamwidth < 2.0 * core::f64::consts::PI) {
            return Err(domain("beamwidth", self.beamwidth));
        }
        if !(self.steer_sigma >= 0.0 && self.steer_sigma.is_finite()) {
            return Err(domain("steering error sigma", self.steer_sigma));
        }
        Ok(())
    }
}

/// Two-point distribution of an array's gain towards its intended node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainPmf {
    /// Gains `(g₁, g₂)`.
    pub values: [f64; 2],
    /// Probabilities `(b₁, b₂)`.
    pub probs: [f64; 2],
}

impl GainPmf {
    /// A gain known with certainty.
    pub fn deterministic(gain: f64) -> Self {
        Self { values: [gain, gain], probs: [1.0, 0.0] }
    }

    /// `(gain, probability)` pairs with nonzero probability.
    pub fn support(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied()).filter(|&(_, b)| b > 0.0)
    }

    /// Draws a gain using one uniform variate.
    pub fn draw(&self, u: f64) -> f64 {
        if u < self.probs[0] {
            self.values[0]
        } else {
            self.values[1]
        }
    }
}

/// Blockage and path-loss parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockageParams {
    /// Decay length of the LOS probability `e^{-d/decay_length}`, meters.
    pub decay_length: f64,
    /// LOS path-loss exponent.
    pub alpha_los: f64,
    /// NLOS path-loss exponent.
    pub alpha_nlos: f64,
    /// LOS path-loss intercept (linear).
    pub c_los: f64,
    /// NLOS path-loss intercept (linear).
    pub c_nlos: f64,
}

impl BlockageParams {
    fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("blockage decay length", self.decay_length),
            ("LOS path-loss exponent", self.alpha_los),
            ("NLOS path-loss exponent", self.alpha_nlos),
            ("LOS path-loss intercept", self.c_los),
            ("NLOS path-loss intercept", self.c_nlos),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(what, v));
            }
        }
        Ok(())
    }
}

impl Default for BlockageParams {
    fn default() -> Self {
        Self { decay_length: 200.0, alpha_los: 2.0, alpha_nlos: 4.0, c_los: 1e-7, c_nlos: 1e-7 }
    }
}

/// Integer Nakagami shapes per blockage state (unit spread).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FadingParams {
    /// Shape for LOS links.
    pub nu_los: u32,
    /// Shape for NLOS links.
    pub nu_nlos: u32,
}

impl FadingParams {
    /// Shape for the given state.
    pub fn nu(&self, state: LinkState) -> u32 {
        match state {
            LinkState::Los => self.nu_los,
            LinkState::Nlos => self.nu_nlos,
        }
    }
}

impl Default for FadingParams {
    fn default() -> Self {
        Self { nu_los: 3, nu_nlos: 2 }
    }
}

/// How the jamming array's gain towards Willie is modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JammerGainMode {
    /// Averaged over the beamsteering-error gain distribution.
    #[default]
    Averaged,
    /// Deterministically the main-lobe gain (multi-array jammer covering all directions).
    DeterministicMain,
}

/// Every physical parameter of the scenario, in linear units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Alice's signal power `P_a`, mW.
    pub pa: f64,
    /// Upper end of the uniform jamming power distribution, mW.
    pub pj_max: f64,
    /// Bob's noise power, mW.
    pub sigma2_b: f64,
    /// Willie's noise power, mW.
    pub sigma2_w: f64,
    /// Alice-Bob distance, m.
    pub d_ab: f64,
    /// Alice-Willie distance, m.
    pub d_aw: f64,
    /// Alice's first (signal) array.
    pub alice_first: AntennaPattern,
    /// Alice's second (jamming) array.
    pub alice_second: AntennaPattern,
    /// Bob's receive array.
    pub bob: AntennaPattern,
    /// Blockage and path loss.
    pub blockage: BlockageParams,
    /// Nakagami shapes.
    pub fading: FadingParams,
    /// Willie sits inside the main lobe of the first array (the Alice-Bob direction).
    pub willie_in_main_lobe: bool,
    /// Jammer gain towards Willie.
    pub jammer_gain_mode: JammerGainMode,
}

impl SystemConfig {
    /// Reference scenario: 25 m links, exponents (2, 4), intercepts 1e-7,
    /// 15/-5 dB lobes, 30° beams, 5° steering error, `P_a` = 20 dBm,
    /// noise -74 dBm, shapes (3, 2), `P_J^max` = 15.52 dBm.
    pub fn benchmark() -> Self {
        let beam = 30f64.to_radians();
        let sigma = 5f64.to_radians();
        let pattern = AntennaPattern {
            main_gain: db_to_linear(15.0),
            side_gain: db_to_linear(-5.0),
            beamwidth: beam,
            steer_sigma: sigma,
        };
        Self {
            pa: db_to_linear(20.0),
            pj_max: db_to_linear(15.52),
            sigma2_b: db_to_linear(-74.0),
            sigma2_w: db_to_linear(-74.0),
            d_ab: 25.0,
            d_aw: 25.0,
            alice_first: pattern,
            alice_second: pattern,
            bob: pattern,
            blockage: BlockageParams::default(),
            fading: FadingParams::default(),
            willie_in_main_lobe: false,
            jammer_gain_mode: JammerGainMode::Averaged,
        }
    }

    /// Copy with a different `P_J^max` (mW).
    pub fn with_pj_max(mut self, pj_max: f64) -> Self {
        self.pj_max = pj_max;
        self
    }

    /// Checks every invariant of the configuration.
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("P_a", self.pa),
            ("sigma2_b", self.sigma2_b),
            ("sigma2_w", self.sigma2_w),
            ("d_ab", self.d_ab),
            ("d_aw", self.d_aw),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(what, v));
            }
        }
        if !(self.pj_max >= 0.0 && self.pj_max.is_finite()) {
            return Err(domain("P_J^max", self.pj_max));
        }
        self.alice_first.validate()?;
        self.alice_second.validate()?;
        self.bob.validate()?;
        self.blockage.validate()?;
        for nu in [self.fading.nu_los, self.fading.nu_nlos] {
            if nu == 0 || nu > specfun::MAX_INTEGER_ARG {
                return Err(domain("Nakagami shape", nu as f64));
            }
        }
        Ok(())
    }

    /// `(state, probability, path loss)` for a link of length `d`.
    pub fn link_states(&self, d: f64) -> Result<[(LinkState, f64, f64); 2]> {
        let p = p_los(d, &self.blockage)?;
        Ok([
            (LinkState::Los, p, path_loss(d, LinkState::Los, &self.blockage)?),
            (LinkState::Nlos, 1.0 - p, path_loss(d, LinkState::Nlos, &self.blockage)?),
        ])
    }

    /// Gain of the signal array towards Willie: side lobe, or the steering-error
    /// distribution when Willie is in the main lobe.
    pub fn signal_gain_at_willie(&self) -> GainPmf {
        if self.willie_in_main_lobe {
            gain_pmf(&self.alice_first)
        } else {
            GainPmf::deterministic(self.alice_first.side_gain)
        }
    }

    /// Gain of the jamming array towards Willie.
    pub fn jammer_gain_at_willie(&self) -> GainPmf {
        match self.jammer_gain_mode {
            JammerGainMode::Averaged => gain_pmf(&self.alice_second),
            JammerGainMode::DeterministicMain => GainPmf::deterministic(self.alice_second.main_gain),
        }
    }

    /// Gain of the jamming array towards Bob: side lobe, or the steering-error
    /// distribution when Willie (and hence the jammer beam) is in the Alice-Bob direction.
    pub fn jammer_gain_at_bob(&self) -> GainPmf {
        if self.willie_in_main_lobe {
            gain_pmf(&self.alice_second)
        } else {
            GainPmf::deterministic(self.alice_second.side_gain)
        }
    }
}

/// LOS probability `e^{-d/decay_length}`.
pub fn p_los(d: f64, bp: &BlockageParams) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(domain("link distance", d));
    }
    Ok(libm::exp(-d / bp.decay_length))
}

/// Path loss `C_state · d^{-α_state}`.
pub fn path_loss(d: f64, state: LinkState, bp: &BlockageParams) -> Result<f64> {
    if !(d > 0.0) {
        return Err(domain("link distance", d));
    }
    let (c, alpha) = match state {
        LinkState::Los => (bp.c_los, bp.alpha_los),
        LinkState::Nlos => (bp.c_nlos, bp.alpha_nlos),
    };
    Ok(c * libm::pow(d, -alpha))
}

/// Gain distribution of an array pointing its main lobe at a node.
///
/// The main lobe is hit when the Gaussian steering error stays within half a
/// beamwidth: `b₁ = erf(θ / (2Δ√2))`.
pub fn gain_pmf(p: &AntennaPattern) -> GainPmf {
    let b1 = if p.steer_sigma == 0.0 {
        1.0
    } else {
        specfun::erf(0.5 * p.beamwidth / (p.steer_sigma * core::f64::consts::SQRT_2))
    };
    GainPmf { values: [p.main_gain, p.side_gain], probs: [b1, 1.0 - b1] }
}

/// Alzer constant `η = ν (ν!)^{-1/ν}`.
pub fn eta(nu: u32) -> f64 {
    let nu_f = nu as f64;
    let ln_fact = match specfun::factorial(nu) {
        Ok(f) => libm::log(f as f64),
        Err(_) => libm::lgamma(nu_f + 1.0),
    };
    nu_f * libm::exp(-ln_fact / nu_f)
}

/// Alzer approximation `(1 - e^{-ηx})^ν` of the unit-mean gamma CDF.
pub fn alzer_cdf(x: f64, nu: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    libm::pow(-libm::expm1(-eta(nu) * x), nu as f64)
}

/// `∫_0^c F_A(x) dx` by quadrature.
pub fn alzer_cdf_integral(c: f64, nu: u32, tol: Tolerance) -> Result<f64> {
    quad::integrate_pieces("Alzer CDF integral", |x| alzer_cdf(x, nu), &quad::decade_breakpoints(&[1.0], Some(c)), false, tol)
        .map(|e| e.value)
}

/// One term `coeff · e^{-rate·x}` of the binomial expansion of [`alzer_cdf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlzerTerm {
    /// Expansion index `l`.
    pub l: u32,
    /// `(-1)^l C(ν, l)`.
    pub coeff: f64,
    /// `l η`.
    pub rate: f64,
}

/// Terms `l = 0..=ν` of `Σ (-1)^l C(ν,l) e^{-lηx}`.
pub fn alzer_terms(nu: u32) -> impl Iterator<Item = AlzerTerm> {
    let eta = eta(nu);
    (0..=nu).map(move |l| {
        let c = specfun::binomial(nu, l).unwrap_or(0) as f64;
        AlzerTerm { l, coeff: if l % 2 == 0 { c } else { -c }, rate: l as f64 * eta }
    })
}

/// Draws a Nakagami power gain `|h|² ~ Gamma(ν, 1/ν)`.
pub fn sample_power_gain<R: RngCore + ?Sized>(nu: u32, rng: &mut R) -> f64 {
    GammaSampler::normalized(nu).sample(rng)
}

/// Density of `Gamma(ν, 1/ν)` at `y`.
pub fn gamma_pdf(y: f64, nu: u32) -> f64 {
    if y <= 0.0 {
        return if nu == 1 && y == 0.0 { 1.0 } else { 0.0 };
    }
    let nu_f = nu as f64;
    let ln_norm = nu_f * libm::log(nu_f) - libm::lgamma(nu_f);
    libm::exp(ln_norm + (nu_f - 1.0) * libm::log(y) - nu_f * y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::substream;
    use alloc::vec::Vec;

    #[test]
    fn los_probability() {
        let bp = BlockageParams::default();
        assert_eq!(p_los(0.0, &bp).unwrap(), 1.0);
        assert!((p_los(200.0, &bp).unwrap() - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert!((p_los(25.0, &bp).unwrap() - 0.882_496_902_584_595_4).abs() < 1e-15);
        assert!(p_los(-1.0, &bp).is_err());
    }

    #[test]
    fn path_loss_values() {
        let bp = BlockageParams::default();
        assert!((path_loss(25.0, LinkState::Los, &bp).unwrap() - 1.6e-10).abs() < 1e-24);
        assert!((path_loss(25.0, LinkState::Nlos, &bp).unwrap() - 2.56e-13).abs() < 1e-27);
        assert_eq!(path_loss(1.0, LinkState::Los, &bp).unwrap(), bp.c_los);
        assert_eq!(path_loss(1.0, LinkState::Nlos, &bp).unwrap(), bp.c_nlos);
        assert!(path_loss(0.0, LinkState::Los, &bp).is_err());
        for i in 1..500 {
            let d = i as f64 * 0.7 + 1.0;
            assert!(path_loss(d, LinkState::Los, &bp).unwrap() >= path_loss(d, LinkState::Nlos, &bp).unwrap());
        }
    }

    #[test]
    fn gain_pmf_reference_angles() {
        let p = AntennaPattern::new(31.6, 0.316, 30f64.to_radians(), 5f64.to_radians()).unwrap();
        let pmf = gain_pmf(&p);
        assert!((pmf.probs[0] - 0.997_300_203_936_739_8).abs() < 1e-12);
        assert!((pmf.probs[1] - 0.002_699_796_063_260_2).abs() < 1e-12);
        assert_eq!(pmf.values, [31.6, 0.316]);

        let exact = AntennaPattern { steer_sigma: 0.0, ..p };
        assert_eq!(gain_pmf(&exact).probs, [1.0, 0.0]);

        let wide = AntennaPattern { beamwidth: 15f64.to_radians(), steer_sigma: 15f64.to_radians(), ..p };
        assert!((gain_pmf(&wide).probs[0] - 0.382_924_922_548_026_2).abs() < 1e-12);
    }

    #[test]
    fn pattern_validation() {
        assert!(AntennaPattern::new(1.0, 2.0, 0.5, 0.1).is_err());
        assert!(AntennaPattern::new(2.0, 0.0, 0.5, 0.1).is_err());
        assert!(AntennaPattern::new(2.0, 1.0, 7.0, 0.1).is_err());
        assert!(AntennaPattern::new(2.0, 1.0, 0.5, -0.1).is_err());
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(1), 1.0);
        assert!((eta(2) - core::f64::consts::SQRT_2).abs() < 1e-15);
        assert!((eta(3) - 1.650_963_624_447_314).abs() < 1e-14);
    }

    #[test]
    fn alzer_basics() {
        for nu in 1..6 {
            assert_eq!(alzer_cdf(0.0, nu), 0.0);
        }
        for i in 0..100 {
            let x = i as f64 * 0.05;
            assert!((alzer_cdf(x, 1) - (1.0 - libm::exp(-x))).abs() < 1e-15);
        }
        // 40-digit value of (1 - e^{-η(3)})^3
        assert!((alzer_cdf(1.0, 3) - 0.527_778_695_858_496_3).abs() < 1e-14);
    }

    #[test]
    fn alzer_expansion_matches_power_form() {
        for nu in 1..8 {
            for i in 0..60 {
                let x = i as f64 * 0.1;
                let series: f64 = alzer_terms(nu).map(|t| t.coeff * libm::exp(-t.rate * x)).sum();
                assert!((series - alzer_cdf(x, nu)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn alzer_lower_bounds_gamma_cdf() {
        // Unit-mean gamma CDF for integer shape: 1 - e^{-νx} Σ_{k<ν} (νx)^k / k!
        let gamma_cdf = |x: f64, nu: u32| {
            let z = nu as f64 * x;
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..nu {
                term *= z / k as f64;
                sum += term;
            }
            1.0 - libm::exp(-z) * sum
        };
        let exact = gamma_cdf(1.0, 3);
        assert!((exact - 0.576_809_918_873_156_5).abs() < 1e-14);
        let gap = exact - alzer_cdf(1.0, 3);
        assert!((gap - 0.049_031_222_9).abs() < 1e-9, "gap {gap}");
        for nu in 1..5 {
            for i in 1..80 {
                let x = i as f64 * 0.05;
                assert!(alzer_cdf(x, nu) <= gamma_cdf(x, nu) + 1e-15);
            }
        }
    }

    #[test]
    fn gamma_sampler_moments() {
        for nu in [1u32, 2, 3] {
            let mut rng = substream(2024, nu as u64);
            let n = 1_000_000;
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let x = sample_power_gain(nu, &mut rng);
                s1 += x;
                s2 += x * x;
            }
            let mean = s1 / n as f64;
            let var = s2 / n as f64 - mean * mean;
            assert!((mean - 1.0).abs() < 0.005, "nu {nu} mean {mean}");
            let want = 1.0 / nu as f64;
            assert!(((var - want) / want).abs() < 0.01, "nu {nu} var {var}");
        }
    }

    #[test]
    fn gamma_sampler_cdf_at_one() {
        let mut rng = substream(99, 0);
        let n = 1_000_000;
        let below = (0..n).filter(|_| sample_power_gain(3, &mut rng) <= 1.0).count();
        let frac = below as f64 / n as f64;
        assert!((frac - 0.576_809_918_873_156_5).abs() < 0.005);
    }

    #[test]
    fn gamma_pdf_normalizes() {
        for nu in 1..5 {
            let xs: Vec<f64> = (0..200_000).map(|i| (i as f64 + 0.5) * 1e-4).collect();
            let s: f64 = xs.iter().map(|&x| gamma_pdf(x, nu)).sum::<f64>() * 1e-4;
            assert!((s - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn benchmark_is_valid() {
        let cfg = SystemConfig::benchmark();
        cfg.validate().unwrap();
        assert!((cfg.pa - 100.0).abs() < 1e-12);
        let mut bad = cfg;
        bad.fading.nu_los = 0;
        assert!(bad.validate().is_err());
    }
}

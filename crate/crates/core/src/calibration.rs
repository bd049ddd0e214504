//! Recruiting cost and social value of nonwork.
//!
//! The recruiting cost comes from the share of labor costs spent on recruiting
//! (`kappa * v = share * (1 - u)`). The social value of nonwork converts study
//! estimates expressed relative to earnings into values relative to the
//! marginal product of labor, then subtracts public benefits where the study
//! counted them.

use ini::Ini;
use serde::Serialize;
use thiserror::Error;

const DEFAULT_PROFILE: &str = include_str!("../data/calibration_default.ini");

#[derive(Debug, Error, PartialEq)]
pub enum CalibrationError {
    #[error("{name} = {value} violates {requirement}")]
    Domain {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    #[error("calibration profile: {0}")]
    Profile(String),
}

fn require(ok: bool, name: &'static str, value: f64, requirement: &'static str) -> Result<(), CalibrationError> {
    if ok {
        Ok(())
    } else {
        Err(CalibrationError::Domain {
            name,
            value,
            requirement,
        })
    }
}

/// The three statistics the gap formulas need.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SufficientStats {
    pub epsilon: f64,
    pub kappa: f64,
    pub zeta: f64,
}

impl SufficientStats {
    pub fn new(epsilon: f64, kappa: f64, zeta: f64) -> Result<Self, CalibrationError> {
        require(epsilon > 0.0 && epsilon.is_finite(), "epsilon", epsilon, "epsilon > 0")?;
        require(kappa > 0.0 && kappa.is_finite(), "kappa", kappa, "kappa > 0")?;
        require(zeta < 1.0 && zeta.is_finite(), "zeta", zeta, "zeta < 1")?;
        Ok(SufficientStats { epsilon, kappa, zeta })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecruitingSurvey {
    pub recruiting_share: f64,
    pub u: f64,
    pub v: f64,
    pub year: String,
}

pub fn kappa_from_survey(s: &RecruitingSurvey) -> Result<f64, CalibrationError> {
    require(s.v > 0.0 && s.v < 1.0, "v", s.v, "0 < v < 1")?;
    require(s.u > 0.0 && s.u < 1.0, "u", s.u, "0 < u < 1")?;
    require(
        s.recruiting_share > 0.0 && s.recruiting_share < 1.0,
        "recruiting_share",
        s.recruiting_share,
        "0 < share < 1",
    )?;
    Ok(s.recruiting_share * (1.0 - s.u) / s.v)
}

/// Multiplicative factors taking earnings to the marginal product of labor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MplAdjustment {
    /// Marginal product over wage paid.
    pub recruiting_wedge: f64,
    pub payroll_tax_factor: f64,
    /// 1 when the study did not discount earnings.
    pub recency_discount_undo: f64,
}

impl MplAdjustment {
    pub fn new(recruiting_wedge: f64, payroll_tax_factor: f64, recency_discount_undo: f64) -> Result<Self, CalibrationError> {
        require(recruiting_wedge >= 1.0, "recruiting_wedge", recruiting_wedge, "factor >= 1")?;
        require(payroll_tax_factor >= 1.0, "payroll_tax_factor", payroll_tax_factor, "factor >= 1")?;
        require(
            recency_discount_undo >= 1.0,
            "recency_discount_undo",
            recency_discount_undo,
            "factor >= 1",
        )?;
        Ok(MplAdjustment {
            recruiting_wedge,
            payroll_tax_factor,
            recency_discount_undo,
        })
    }
}

pub fn mpl_factor(adj: &MplAdjustment) -> f64 {
    adj.recruiting_wedge * adj.payroll_tax_factor * adj.recency_discount_undo
}

/// Public benefits available to the unemployed, as fractions of the MPL.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenefitOffset {
    pub ui_replacement: f64,
    pub takeup: f64,
    pub tax_factor: f64,
    pub filing_disutility_factor: f64,
    pub expiry_factor: f64,
    pub other_benefits: f64,
}

impl BenefitOffset {
    pub fn new(
        ui_replacement: f64,
        takeup: f64,
        tax_factor: f64,
        filing_disutility_factor: f64,
        expiry_factor: f64,
        other_benefits: f64,
    ) -> Result<Self, CalibrationError> {
        for (name, x) in [
            ("ui_replacement", ui_replacement),
            ("takeup", takeup),
            ("tax_factor", tax_factor),
            ("filing_disutility_factor", filing_disutility_factor),
            ("expiry_factor", expiry_factor),
            ("other_benefits", other_benefits),
        ] {
            require((0.0..=1.0).contains(&x), name, x, "0 <= x <= 1")?;
        }
        Ok(BenefitOffset {
            ui_replacement,
            takeup,
            tax_factor,
            filing_disutility_factor,
            expiry_factor,
            other_benefits,
        })
    }

    /// Effective value of UI benefits.
    pub fn ui_value(&self) -> f64 {
        self.ui_replacement * self.takeup * self.tax_factor * self.filing_disutility_factor * self.expiry_factor
    }

    /// UI component rounded to a whole percent, plus other benefits.
    pub fn value_rounded_percent(&self) -> f64 {
        (self.ui_value() * 100.0).round() / 100.0 + self.other_benefits
    }
}

pub fn benefit_offset_value(b: &BenefitOffset) -> f64 {
    b.ui_value() + b.other_benefits
}

/// Study estimate (relative to earnings) converted to a social value of nonwork.
pub fn zeta_from_study(raw_replacement: f64, factor: f64, offset: f64) -> Result<f64, CalibrationError> {
    require(factor >= 1.0, "factor", factor, "factor >= 1")?;
    Ok(raw_replacement / factor - offset)
}

pub fn zeta_midrange(lo: f64, hi: f64) -> Result<f64, CalibrationError> {
    require(lo <= hi, "zeta_lo", lo, "zeta_lo <= zeta_hi")?;
    Ok(0.5 * (lo + hi))
}

/// Bounds on the social value of nonwork implied by the two studies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaBounds {
    /// Reenlistment study, low and high ends (benefits subtracted).
    pub reenlistment: (f64, f64),
    /// Field experiment, low and high ends.
    pub field_experiment: (f64, f64),
}

impl ZetaBounds {
    pub fn min(&self) -> f64 {
        self.reenlistment.0.min(self.field_experiment.0)
    }

    pub fn max(&self) -> f64 {
        self.reenlistment.1.max(self.field_experiment.1)
    }
}

/// Everything needed to calibrate kappa and zeta, loadable from a
/// `key = value` profile with sections.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationProfile {
    pub survey: RecruitingSurvey,
    pub zeta: f64,
    pub zeta_lo: f64,
    pub zeta_hi: f64,
    pub mpl_low: MplAdjustment,
    pub mpl_high: MplAdjustment,
    pub recency_discount_undo: f64,
    pub benefits: BenefitOffset,
    pub round_ui_percent: bool,
    pub reenlistment_lo: f64,
    pub reenlistment_hi: f64,
    pub field_experiment: f64,
}

impl Default for CalibrationProfile {
    fn default() -> Self {
        CalibrationProfile::parse(DEFAULT_PROFILE).expect("bundled calibration profile is valid")
    }
}

impl CalibrationProfile {
    pub fn default_text() -> &'static str {
        DEFAULT_PROFILE
    }

    pub fn parse(text: &str) -> Result<Self, CalibrationError> {
        let ini = Ini::load_from_str(text).map_err(|e| CalibrationError::Profile(e.to_string()))?;
        let get = |section: &str, key: &str| -> Result<f64, CalibrationError> {
            let raw = ini
                .section(Some(section))
                .and_then(|s| s.get(key))
                .ok_or_else(|| CalibrationError::Profile(format!("missing [{section}] {key}")))?;
            raw.trim()
                .parse::<f64>()
                .map_err(|_| CalibrationError::Profile(format!("[{section}] {key}: bad number `{raw}`")))
        };
        let get_or = |section: &str, key: &str, default: f64| -> Result<f64, CalibrationError> {
            match ini.section(Some(section)).and_then(|s| s.get(key)) {
                Some(_) => get(section, key),
                None => Ok(default),
            }
        };
        let round_ui_percent = match ini.section(Some("benefits")).and_then(|s| s.get("round_ui_percent")) {
            None => false,
            Some(raw) => raw
                .trim()
                .parse::<bool>()
                .map_err(|_| CalibrationError::Profile(format!("[benefits] round_ui_percent: bad bool `{raw}`")))?,
        };

        let recency = get_or("recency", "recency_discount_undo", 1.0)?;
        let profile = CalibrationProfile {
            survey: RecruitingSurvey {
                recruiting_share: get("survey", "recruiting_share")?,
                u: get("survey", "u_1997")?,
                v: get("survey", "v_1997")?,
                year: "1997".to_string(),
            },
            zeta: get("zeta", "zeta")?,
            zeta_lo: get("zeta", "zeta_lo")?,
            zeta_hi: get("zeta", "zeta_hi")?,
            mpl_low: MplAdjustment::new(
                get("mpl_low", "recruiting_wedge")?,
                get("mpl_low", "payroll_tax_factor")?,
                1.0,
            )?,
            mpl_high: MplAdjustment::new(
                get("mpl_high", "recruiting_wedge")?,
                get("mpl_high", "payroll_tax_factor")?,
                1.0,
            )?,
            recency_discount_undo: recency,
            benefits: BenefitOffset::new(
                get("benefits", "ui_replacement")?,
                get("benefits", "takeup")?,
                get("benefits", "tax_factor")?,
                get("benefits", "filing_disutility_factor")?,
                get("benefits", "expiry_factor")?,
                get("benefits", "other_benefits")?,
            )?,
            round_ui_percent,
            reenlistment_lo: get("studies", "reenlistment_lo")?,
            reenlistment_hi: get("studies", "reenlistment_hi")?,
            field_experiment: get("studies", "field_experiment")?,
        };
        require(recency >= 1.0, "recency_discount_undo", recency, "factor >= 1")?;
        require(profile.zeta < 1.0, "zeta", profile.zeta, "zeta < 1")?;
        require(profile.zeta_lo <= profile.zeta_hi, "zeta_lo", profile.zeta_lo, "zeta_lo <= zeta_hi")?;
        Ok(profile)
    }

    pub fn kappa(&self) -> Result<f64, CalibrationError> {
        kappa_from_survey(&self.survey)
    }

    pub fn benefit_offset(&self) -> f64 {
        if self.round_ui_percent {
            self.benefits.value_rounded_percent()
        } else {
            benefit_offset_value(&self.benefits)
        }
    }

    /// Runs the earnings-to-MPL and benefit adjustments for both studies.
    ///
    /// A larger MPL factor lowers the implied value, so each study's low end
    /// pairs its low raw estimate with the high factor.
    pub fn zeta_bounds(&self) -> Result<ZetaBounds, CalibrationError> {
        let low = mpl_factor(&self.mpl_low);
        let high = mpl_factor(&self.mpl_high);
        let offset = self.benefit_offset();
        let reenlistment = (
            zeta_from_study(self.reenlistment_lo, high, offset)?,
            zeta_from_study(self.reenlistment_hi, low, offset)?,
        );
        let fe_low = low * self.recency_discount_undo;
        let fe_high = high * self.recency_discount_undo;
        let field_experiment = (
            zeta_from_study(self.field_experiment, fe_high, 0.0)?,
            zeta_from_study(self.field_experiment, fe_low, 0.0)?,
        );
        Ok(ZetaBounds {
            reenlistment,
            field_experiment,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn survey(share: f64, u: f64, v: f64) -> RecruitingSurvey {
        RecruitingSurvey {
            recruiting_share: share,
            u,
            v,
            year: "test".into(),
        }
    }

    #[test]
    fn kappa_examples() {
        let k = kappa_from_survey(&survey(0.025, 0.049, 0.033)).unwrap();
        assert!((k - 0.7205).abs() < 1e-4);
        // share * (1 - u) == v
        let k = kappa_from_survey(&survey(0.03 / 0.95, 0.05, 0.03)).unwrap();
        assert!((k - 1.0).abs() < 1e-12);
        let k = kappa_from_survey(&survey(0.03, 0.05, 0.03)).unwrap();
        assert!((k - 0.95).abs() < 1e-12);
        assert!(kappa_from_survey(&survey(0.03, 0.05, 0.0)).is_err());
    }

    #[test]
    fn mpl_factor_examples() {
        let f = mpl_factor(&MplAdjustment::new(1.03, 1.077, 1.0).unwrap());
        assert!((f - 1.10931).abs() < 1e-9);
        let f = mpl_factor(&MplAdjustment::new(1.25, 1.077, 1.06).unwrap());
        assert!((f - 1.427025).abs() < 1e-9);
        assert_eq!(mpl_factor(&MplAdjustment::new(1.0, 1.0, 1.0).unwrap()), 1.0);
        assert!(MplAdjustment::new(0.9, 1.0, 1.0).is_err());
    }

    #[test]
    fn benefit_offset_examples() {
        let b = BenefitOffset::new(0.215, 0.65, 0.83, 0.47, 0.83, 0.02).unwrap();
        let ui = 0.215 * 0.65 * 0.83 * 0.47 * 0.83;
        assert!((b.ui_value() - ui).abs() < 1e-15);
        assert!((benefit_offset_value(&b) - 0.0653).abs() < 1e-4);
        assert!((b.value_rounded_percent() - 0.07).abs() < 1e-12);
        let zero = BenefitOffset::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(benefit_offset_value(&zero), 0.0);
        let pass = BenefitOffset::new(0.2, 1.0, 1.0, 1.0, 1.0, 0.0).unwrap();
        assert!((benefit_offset_value(&pass) - 0.2).abs() < 1e-15);
        assert!(BenefitOffset::new(1.2, 1.0, 1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn zeta_from_study_examples() {
        let z = |r, f, o| zeta_from_study(r, f, o).unwrap();
        assert!((z(0.58, 1.43, 0.0) - 0.406).abs() < 1e-3);
        assert!((z(0.58, 1.18, 0.0) - 0.492).abs() < 1e-3);
        assert!((z(0.13, 1.35, 0.07) - 0.0263).abs() < 1e-4);
        assert!((z(0.35, 1.11, 0.07) - 0.245).abs() < 1e-3);
        assert_eq!(z(0.0, 1.0, 0.0), 0.0);
        assert!(zeta_from_study(0.5, 0.9, 0.0).is_err());
    }

    #[test]
    fn zeta_midrange_examples() {
        assert_eq!(zeta_midrange(0.0, 0.5).unwrap(), 0.25);
        assert_eq!(zeta_midrange(0.3, 0.3).unwrap(), 0.3);
        assert!((zeta_midrange(0.03, 0.49).unwrap() - 0.26).abs() < 1e-15);
        assert!(zeta_midrange(0.5, 0.0).is_err());
    }

    #[test]
    fn default_profile_reproduces_published_bounds() {
        let p = CalibrationProfile::default();
        assert!((p.kappa().unwrap() - 0.72).abs() < 0.005);
        let b = p.zeta_bounds().unwrap();
        for (got, want) in [
            (b.reenlistment.0, 0.03),
            (b.reenlistment.1, 0.25),
            (b.field_experiment.0, 0.41),
            (b.field_experiment.1, 0.49),
        ] {
            assert!((got - want).abs() <= 0.005, "{got} vs {want}");
        }
        assert_eq!(p.zeta, 0.25);
        assert_eq!(zeta_midrange(p.zeta_lo, p.zeta_hi).unwrap(), p.zeta);
    }

    #[test]
    fn exact_offset_profile_differs() {
        let text = CalibrationProfile::default_text().replace("round_ui_percent = true", "round_ui_percent = false");
        let p = CalibrationProfile::parse(&text).unwrap();
        assert!((p.benefit_offset() - 0.0653).abs() < 1e-4);
        let b = p.zeta_bounds().unwrap();
        assert!(b.reenlistment.0 > CalibrationProfile::default().zeta_bounds().unwrap().reenlistment.0);
    }

    #[test]
    fn profile_errors() {
        let missing = CalibrationProfile::default_text().replace("u_1997 = 0.049", "");
        assert!(matches!(CalibrationProfile::parse(&missing), Err(CalibrationError::Profile(_))));
        let bad = CalibrationProfile::default_text().replace("zeta = 0.25", "zeta = 1.5");
        assert!(matches!(CalibrationProfile::parse(&bad), Err(CalibrationError::Domain { name: "zeta", .. })));
    }

    #[test]
    fn sufficient_stats_invariants() {
        assert!(SufficientStats::new(1.0, 0.72, 0.25).is_ok());
        assert!(SufficientStats::new(0.0, 0.72, 0.25).is_err());
        assert!(SufficientStats::new(1.0, 0.0, 0.25).is_err());
        assert!(SufficientStats::new(1.0, 0.72, 1.0).is_err());
        assert!(SufficientStats::new(1.0, 0.72, -0.5).is_ok());
    }

    proptest! {
        #[test]
        fn kappa_homogeneity(share in 0.001f64..0.2, u in 0.01f64..0.2, v in 0.005f64..0.2, c in 0.5f64..2.0) {
            let base = kappa_from_survey(&survey(share, u, v)).unwrap();
            prop_assume!(v * c < 1.0 && share * c < 1.0);
            let scaled_v = kappa_from_survey(&survey(share, u, v * c)).unwrap();
            let scaled_s = kappa_from_survey(&survey(share * c, u, v)).unwrap();
            prop_assert!((scaled_v - base / c).abs() <= 1e-12 * base.max(1.0));
            prop_assert!((scaled_s - base * c).abs() <= 1e-12 * base.max(1.0));
        }

        #[test]
        fn zeta_monotonicity(r in 0.0f64..1.0, f in 1.0f64..2.0, o in 0.0f64..0.2, d in 1e-3f64..0.1) {
            let base = zeta_from_study(r, f, o).unwrap();
            prop_assert!(zeta_from_study(r + d, f, o).unwrap() > base);
            prop_assert!(zeta_from_study(r, f, o + d).unwrap() < base);
            if r > 0.0 {
                prop_assert!(zeta_from_study(r, f + d, o).unwrap() < base);
            }
        }
    }
}

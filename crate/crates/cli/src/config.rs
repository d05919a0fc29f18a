use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use exact_approx::algebra::text::parse_field;
use exact_approx::algebra::{parse_rational, FieldSpec, Rational};
use exact_approx::cantor::BuildOptions;
use exact_approx::template::{Constants, Growth, PsiFunction, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Paper,
    Desk,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Field spec, e.g. `q=2` or `q=4; modulus=X^2+X+1`.
    pub field: String,
    pub n: usize,
    /// Decay exponent of `psi(H) = H^{-s}` as `num/den`.
    pub s: String,
    pub constants: ConstantsConfig,
    pub schedule: ScheduleConfig,
    pub run: RunConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    /// `paper` or `desk`.
    pub preset: String,
    #[serde(
        rename = "M",
        alias = "m",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub m: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r3: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub t0: i64,
    pub epochs: usize,
    /// Explicit `t_1, ..., t_K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<i64>,
    /// Growth factor `t_{k+1} / t_k` as `num/den`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<String>,
    pub ratio_eps: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<i64>,
    pub seed: u64,
    pub frontier_cap: usize,
    /// Leaves walked by the verifier; all when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify_leaves: Option<usize>,
    /// Points written by `construct`.
    pub points: usize,
    /// Horizon of `trajectory` and `template`.
    pub horizon: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_max: Option<i64>,
}

fn rat(s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| anyhow!("bad rational {s:?}: {e}"))
}

impl ExperimentConfig {
    pub fn preset(p: Preset) -> Self {
        let (preset, m, t0, times) = match p {
            Preset::Desk => ("desk", None, 9, vec![540, 43200]),
            Preset::Paper => ("paper", Some(1), 15, vec![600]),
        };
        ExperimentConfig {
            field: "q=2".into(),
            n: 1,
            s: "3/1".into(),
            constants: ConstantsConfig {
                preset: preset.into(),
                m,
                r0: None,
                r1: None,
                r2: None,
                r3: None,
                c1: None,
            },
            schedule: ScheduleConfig {
                t0,
                epochs: times.len(),
                times: Some(times),
                t1: None,
                growth: None,
                ratio_eps: "1/10".into(),
            },
            run: RunConfig {
                depth: None,
                seed: 1,
                frontier_cap: 64,
                verify_leaves: None,
                points: 4,
                horizon: 60,
                d_max: None,
            },
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("parsing config")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn field_spec(&self) -> Result<FieldSpec> {
        Ok(parse_field(&self.field)?)
    }

    pub fn psi(&self) -> Result<PsiFunction> {
        Ok(PsiFunction::power_law(self.n, rat(&self.s)?)?)
    }

    pub fn constants(&self) -> Result<Constants> {
        let c = &self.constants;
        let mut k = match c.preset.as_str() {
            "desk" => {
                let mut k = Constants::desk(self.n);
                if let Some(m) = c.m {
                    k.m = m;
                }
                k
            }
            "paper" => Constants::paper(&self.psi()?, c.m.unwrap_or(1)),
            other => bail!("unknown constants preset {other:?}"),
        };
        for (slot, v) in [
            (&mut k.r0, &c.r0),
            (&mut k.r1, &c.r1),
            (&mut k.r2, &c.r2),
            (&mut k.r3, &c.r3),
            (&mut k.c1, &c.c1),
        ] {
            if let Some(v) = v {
                *slot = rat(v)?;
            }
        }
        Ok(k)
    }

    pub fn growth(&self) -> Result<Growth> {
        let s = &self.schedule;
        match (&s.times, &s.growth) {
            (Some(t), None) => Ok(Growth::Times(t.clone())),
            (None, Some(g)) => {
                let g = rat(g)?;
                match s.t1 {
                    None => Ok(Growth::Factor(g)),
                    Some(t1) => {
                        let mut times = vec![t1];
                        let mut t = Rational::from_integer(t1);
                        for _ in 1..s.epochs {
                            t *= g;
                            times.push(t.ceil().to_integer());
                        }
                        Ok(Growth::Times(times))
                    }
                }
            }
            _ => bail!("schedule needs exactly one of `times` and `growth`"),
        }
    }

    /// The validated schedule.
    pub fn schedule(&self) -> Result<Schedule> {
        let f = self.field_spec()?;
        let s = &self.schedule;
        Ok(Schedule::choose(
            self.psi()?,
            f.q(),
            self.constants()?,
            s.t0,
            &self.growth()?,
            s.epochs,
            rat(&s.ratio_eps)?,
        )?)
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            frontier_cap: self.run.frontier_cap,
            seed: self.run.seed,
        }
    }
}

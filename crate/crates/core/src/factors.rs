//! Context factor profiles: declared properties of the input, the purpose
//! and the output, resolved into engine parameters.
//!
//! Profiles are flat `section.field=value` files. Unknown keys and enum
//! values are errors; missing fields take defaults. Factor combinations
//! the engine cannot honour resolve to an `Unsupported` error instead of
//! silently degrading.

use serde::Serialize;
use thiserror::Error;

use crate::cohesion::EdgeWeights;
use crate::select::ScoreWeights;
use crate::synthesize::SummaryFormat;

macro_rules! factor_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub fn parse(value: &str) -> Option<Self> {
                match value {
                    $($text => Some(Self::$variant),)+
                    _ => None,
                }
            }

            pub fn as_str(&self) -> &'static str {
                match self {
                    $(Self::$variant => $text),+
                }
            }
        }
    };
}

factor_enum!(Structure { Flat => "flat", HeadedSource => "headed_source" });
factor_enum!(Subject { Ordinary => "ordinary", Specialised => "specialised", Restricted => "restricted" });
factor_enum!(Unit { Single => "single", Multiple => "multiple" });
factor_enum!(Situation { Tied => "tied", Floating => "floating" });
factor_enum!(Audience { Untargetted => "untargetted", Targetted => "targetted" });
factor_enum!(SummaryUse {
    Retrieving => "retrieving",
    Previewing => "previewing",
    Substitute => "substitute",
    Refreshing => "refreshing",
    Prompt => "prompt",
});
factor_enum!(Material { Covering => "covering", Partial => "partial" });
factor_enum!(Style {
    Informative => "informative",
    Indicative => "indicative",
    Critical => "critical",
    Aggregative => "aggregative",
});

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputFactors {
    pub structure: Structure,
    pub scale: u64,
    pub medium: String,
    pub genre: String,
    pub subject: Subject,
    pub unit: Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurposeFactors {
    pub situation: Situation,
    pub audience: Audience,
    pub usage: SummaryUse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFactors {
    pub material: Material,
    pub format: SummaryFormat,
    pub style: Style,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorProfile {
    pub input: InputFactors,
    pub purpose: PurposeFactors,
    pub output: OutputFactors,
}

impl Default for FactorProfile {
    fn default() -> Self {
        FactorProfile {
            input: InputFactors {
                structure: Structure::Flat,
                scale: 1000,
                medium: "en".into(),
                genre: "general".into(),
                subject: Subject::Ordinary,
                unit: Unit::Single,
            },
            purpose: PurposeFactors {
                situation: Situation::Floating,
                audience: Audience::Untargetted,
                usage: SummaryUse::Previewing,
            },
            output: OutputFactors {
                material: Material::Covering,
                format: SummaryFormat::Running,
                style: Style::Indicative,
            },
        }
    }
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("line {line}: expected key=value, got '{text}'")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown profile key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("unknown value '{value}' for {key}")]
    UnknownValue { key: String, value: String },
    #[error("{key} must be a positive integer, got '{value}'")]
    InvalidScale { key: String, value: String },
    #[error("unsupported {field} '{value}': {reason}")]
    Unsupported {
        field: String,
        value: String,
        reason: String,
    },
    #[error("invalid compression ratio {0}: must lie in (0, 0.5]")]
    InvalidRatio(f64),
}

fn enum_err(key: &str, value: &str) -> ProfileError {
    ProfileError::UnknownValue {
        key: key.to_string(),
        value: value.to_string(),
    }
}

/// Parses the flat profile format. Missing fields keep defaults; blank
/// lines and `#` comments are skipped.
pub fn parse_profile(text: &str) -> Result<FactorProfile, ProfileError> {
    let mut profile = FactorProfile::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ProfileError::Malformed {
                line,
                text: trimmed.to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "input.structure" => {
                profile.input.structure =
                    Structure::parse(value).ok_or_else(|| enum_err(key, value))?;
            }
            "input.scale" => {
                profile.input.scale =
                    value
                        .parse::<u64>()
                        .ok()
                        .filter(|v| *v > 0)
                        .ok_or_else(|| ProfileError::InvalidScale {
                            key: key.to_string(),
                            value: value.to_string(),
                        })?;
            }
            "input.medium" => profile.input.medium = value.to_string(),
            "input.genre" => profile.input.genre = value.to_string(),
            "input.subject" => {
                profile.input.subject =
                    Subject::parse(value).ok_or_else(|| enum_err(key, value))?;
            }
            "input.unit" => {
                profile.input.unit = Unit::parse(value).ok_or_else(|| enum_err(key, value))?;
            }
            "purpose.situation" => {
                profile.purpose.situation =
                    Situation::parse(value).ok_or_else(|| enum_err(key, value))?;
            }
            "purpose.audience" => {
                profile.purpose.audience =
                    Audience::parse(value).ok_or_else(|| enum_err(key, value))?;
            }
            "purpose.use" => {
                profile.purpose.usage =
                    SummaryUse::parse(value).ok_or_else(|| enum_err(key, value))?;
            }
            "output.material" => {
                profile.output.material =
                    Material::parse(value).ok_or_else(|| enum_err(key, value))?;
            }
            "output.format" => {
                profile.output.format = match value {
                    "running" => SummaryFormat::Running,
                    "headed" => SummaryFormat::Headed,
                    _ => return Err(enum_err(key, value)),
                };
            }
            "output.style" => {
                profile.output.style = Style::parse(value).ok_or_else(|| enum_err(key, value))?;
            }
            _ => {
                return Err(ProfileError::UnknownKey {
                    line,
                    key: key.to_string(),
                });
            }
        }
    }
    Ok(profile)
}

/// Writes every field back in the flat format; `parse_profile` of the
/// result reproduces the profile.
pub fn serialize_profile(p: &FactorProfile) -> String {
    let format = match p.output.format {
        SummaryFormat::Running => "running",
        SummaryFormat::Headed => "headed",
    };
    format!(
        "input.structure={}\ninput.scale={}\ninput.medium={}\ninput.genre={}\ninput.subject={}\ninput.unit={}\npurpose.situation={}\npurpose.audience={}\npurpose.use={}\noutput.material={}\noutput.format={}\noutput.style={}\n",
        p.input.structure.as_str(),
        p.input.scale,
        p.input.medium,
        p.input.genre,
        p.input.subject.as_str(),
        p.input.unit.as_str(),
        p.purpose.situation.as_str(),
        p.purpose.audience.as_str(),
        p.purpose.usage.as_str(),
        p.output.material.as_str(),
        format,
        p.output.style.as_str(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionMode {
    Predications,
    Sentences,
    Keyterms,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineParams {
    pub compression_ratio: f64,
    pub edge_weights: EdgeWeights,
    pub score_weights: ScoreWeights,
    pub output_format: SummaryFormat,
    pub projection_mode: ProjectionMode,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams {
            compression_ratio: 0.10,
            edge_weights: EdgeWeights::default(),
            score_weights: ScoreWeights::default(),
            output_format: SummaryFormat::Running,
            projection_mode: ProjectionMode::Predications,
        }
    }
}

impl EngineParams {
    pub fn validate(&self) -> Result<(), ProfileError> {
        if !(self.compression_ratio > 0.0 && self.compression_ratio <= 0.5) {
            return Err(ProfileError::InvalidRatio(self.compression_ratio));
        }
        Ok(())
    }
}

/// Maps a profile onto engine parameters, rejecting combinations this
/// engine does not implement.
pub fn resolve(profile: &FactorProfile) -> Result<EngineParams, ProfileError> {
    match profile.output.style {
        Style::Indicative => {}
        other => {
            return Err(ProfileError::Unsupported {
                field: "output.style".into(),
                value: other.as_str().into(),
                reason: "only indicative summaries are produced".into(),
            });
        }
    }
    if profile.output.material == Material::Partial {
        return Err(ProfileError::Unsupported {
            field: "output.material".into(),
            value: "partial".into(),
            reason: "query-directed partial coverage is not implemented".into(),
        });
    }
    if profile.input.unit == Unit::Multiple {
        return Err(ProfileError::Unsupported {
            field: "input.unit".into(),
            value: "multiple".into(),
            reason: "multi-document condensation is not implemented".into(),
        });
    }
    if profile.purpose.usage == SummaryUse::Substitute {
        return Err(ProfileError::Unsupported {
            field: "purpose.use".into(),
            value: "substitute".into(),
            reason: "a substitute summary needs informative coverage".into(),
        });
    }
    let (ratio, projection) = match profile.purpose.usage {
        SummaryUse::Retrieving | SummaryUse::Prompt => (0.05, ProjectionMode::Keyterms),
        SummaryUse::Previewing | SummaryUse::Refreshing => (0.10, ProjectionMode::Predications),
        SummaryUse::Substitute => unreachable!("rejected above"),
    };
    let params = EngineParams {
        compression_ratio: ratio,
        edge_weights: EdgeWeights::default(),
        score_weights: ScoreWeights::default(),
        output_format: profile.output.format,
        projection_mode: projection,
    };
    params.validate()?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_profile_is_all_defaults() {
        let p = parse_profile("").unwrap();
        assert_eq!(p, FactorProfile::default());
        let params = resolve(&p).unwrap();
        assert_eq!(params, EngineParams::default());
    }

    #[test]
    fn parse_serialize_round_trip() {
        let text = "purpose.use=retrieving\noutput.format=headed\ninput.subject=specialised\n";
        let p = parse_profile(text).unwrap();
        let again = parse_profile(&serialize_profile(&p)).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn unknown_value_names_key_and_value() {
        let err = parse_profile("output.style=criticall\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("criticall"));
        assert!(msg.contains("output.style"));
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_profile("output.tone=calm\n").unwrap_err();
        assert!(matches!(err, ProfileError::UnknownKey { line: 1, .. }));
    }

    #[test]
    fn retrieving_use_tightens_ratio_and_projects_keyterms() {
        let p = parse_profile("purpose.use=retrieving\n").unwrap();
        let params = resolve(&p).unwrap();
        assert_eq!(params.compression_ratio, 0.05);
        assert_eq!(params.projection_mode, ProjectionMode::Keyterms);
    }

    #[test]
    fn unsupported_combinations_name_their_field() {
        for (text, field) in [
            ("output.style=critical\n", "output.style"),
            ("output.style=informative\n", "output.style"),
            ("output.style=aggregative\n", "output.style"),
            ("output.material=partial\n", "output.material"),
            ("input.unit=multiple\n", "input.unit"),
            ("purpose.use=substitute\n", "purpose.use"),
        ] {
            let p = parse_profile(text).unwrap();
            let err = resolve(&p).unwrap_err();
            let msg = err.to_string();
            assert!(msg.contains(field), "{msg}");
            assert!(matches!(err, ProfileError::Unsupported { .. }));
        }
    }

    #[test]
    fn scale_must_be_positive() {
        assert!(parse_profile("input.scale=0\n").is_err());
        assert!(parse_profile("input.scale=xyz\n").is_err());
        assert_eq!(parse_profile("input.scale=250\n").unwrap().input.scale, 250);
    }
}

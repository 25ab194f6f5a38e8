//! JSON file formats for models, acts, events, lotteries and preference tables.
//!
//! Rationals are written as canonical `"p/q"` strings; on input a string
//! `"p/q"`, a string integer or a JSON integer is accepted.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::act::{check_act_cap, Act, OutcomeSpace};
use crate::error::{Error, Result};
use crate::event::{Event, StateSpace};
use crate::family::{act_name, PreferenceTable};
use crate::lottery::Lottery;
use crate::model::{GsleuModel, Level};
use crate::rational::{self, format_rational, parse_rational, Q};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Parses JSON text, keeping serde's line and column in the message.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| perr(format!("invalid JSON: {e}")))
}

pub fn read_text(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    std::fs::read_to_string(path).map_err(|e| perr(format!("cannot read {}: {e}", path.display())))
}

pub fn rational_from_json(value: &Value, what: &str) -> Result<Q> {
    match value {
        Value::String(s) => parse_rational(s).map_err(|e| perr(format!("{what}: {e}"))),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(rational::int(i)),
            None => Err(perr(format!(
                "{what}: {n} is not an integer; write fractions as \"p/q\" strings"
            ))),
        },
        other => Err(perr(format!("{what}: expected a rational, found {other}"))),
    }
}

fn field<'a>(obj: &'a Value, key: &str, what: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| perr(format!("{what}: missing field {key:?}")))
}

fn object<'a>(value: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| perr(format!("{what}: expected an object")))
}

fn string_list(value: &Value, what: &str) -> Result<Vec<String>> {
    value
        .as_array()
        .ok_or_else(|| perr(format!("{what}: expected an array of strings")))?
        .iter()
        .map(|v| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| perr(format!("{what}: expected strings, found {v}")))
        })
        .collect()
}

pub fn event_to_json(event: &Event) -> Value {
    json!(event.labels())
}

pub fn event_from_json(space: &Arc<StateSpace>, value: &Value) -> Result<Event> {
    let labels = string_list(value, "event")?;
    Event::from_labels(space, &labels)
}

pub fn model_to_json(model: &GsleuModel) -> Value {
    let levels: Vec<Value> = model
        .levels()
        .iter()
        .map(|level| {
            let prob: Map<String, Value> = level
                .support
                .members()
                .map(|s| {
                    (
                        model.space().label(s).to_string(),
                        json!(format_rational(&level.prob[s])),
                    )
                })
                .collect();
            let utility: Map<String, Value> = model
                .outcomes()
                .labels()
                .iter()
                .zip(&level.utility)
                .map(|(o, u)| (o.clone(), json!(format_rational(u))))
                .collect();
            json!({
                "support": event_to_json(&level.support),
                "prob": prob,
                "utility": utility,
            })
        })
        .collect();
    json!({
        "states": model.space().labels(),
        "outcomes": model.outcomes().labels(),
        "levels": levels,
    })
}

/// Parses and validates a model. Every support state needs a probability;
/// states off the support may be omitted or given weight zero.
pub fn model_from_json(value: &Value) -> Result<GsleuModel> {
    let space = StateSpace::new(string_list(field(value, "states", "model")?, "states")?)?;
    let outcomes = OutcomeSpace::new(string_list(field(value, "outcomes", "model")?, "outcomes")?)?;
    let levels_json = field(value, "levels", "model")?
        .as_array()
        .ok_or_else(|| perr("levels: expected an array"))?;
    let mut levels = Vec::with_capacity(levels_json.len());
    for (i, lv) in levels_json.iter().enumerate() {
        let what = format!("level {}", i + 1);
        let support = event_from_json(&space, field(lv, "support", &what)?)?;
        let prob_map = object(field(lv, "prob", &what)?, &what)?;
        for key in prob_map.keys() {
            if space.index_of(key).is_none() {
                return Err(Error::UnknownState(key.clone()));
            }
        }
        let mut prob = vec![rational::zero(); space.len()];
        for s in 0..space.len() {
            let label = space.label(s);
            match prob_map.get(label) {
                Some(v) => prob[s] = rational_from_json(v, &format!("{what} prob {label}"))?,
                None if support.contains(s) => {
                    return Err(perr(format!(
                        "{what}: prob mapping is missing support state {label}"
                    )))
                }
                None => {}
            }
        }
        let util_map = object(field(lv, "utility", &what)?, &what)?;
        for key in util_map.keys() {
            if outcomes.index_of(key).is_none() {
                return Err(Error::UnknownOutcome(key.clone()));
            }
        }
        let utility = outcomes
            .labels()
            .iter()
            .map(|o| match util_map.get(o) {
                Some(v) => rational_from_json(v, &format!("{what} utility {o}")),
                None => Err(perr(format!("{what}: utility mapping is missing outcome {o}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        levels.push(Level::new(support, prob, utility));
    }
    GsleuModel::new(space, outcomes, levels)
}

pub fn model_from_str(text: &str) -> Result<GsleuModel> {
    model_from_json(&parse_json(text)?)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GsleuModel> {
    model_from_str(&read_text(path)?)
}

pub fn act_to_json(act: &Act, name: &str) -> Value {
    let map: Map<String, Value> = (0..act.space().len())
        .map(|s| (act.space().label(s).to_string(), json!(act.label_at(s))))
        .collect();
    json!({ "name": name, "map": map })
}

/// Parses `{"name":…, "map":{state: outcome}}`; every state is required.
pub fn act_from_json(
    space: &Arc<StateSpace>,
    outcomes: &Arc<OutcomeSpace>,
    value: &Value,
) -> Result<(String, Act)> {
    let name = value
        .get("name")
        .and_then(Value::as_str)
        .unwrap_or("")
        .to_string();
    let map = object(field(value, "map", "act")?, "act map")?;
    for key in map.keys() {
        if space.index_of(key).is_none() {
            return Err(Error::UnknownState(key.clone()));
        }
    }
    let labels = space
        .labels()
        .iter()
        .map(|s| {
            map.get(s)
                .and_then(Value::as_str)
                .ok_or_else(|| perr(format!("act {name:?}: missing outcome for state {s}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((name, Act::from_labels(space, outcomes, labels)?))
}

pub fn load_act(path: impl AsRef<Path>, model: &GsleuModel) -> Result<Act> {
    let value = parse_json(&read_text(path)?)?;
    Ok(act_from_json(model.space(), model.outcomes(), &value)?.1)
}

pub fn lottery_to_json(lottery: &Lottery) -> Value {
    let map: Map<String, Value> = lottery
        .labeled()
        .into_iter()
        .map(|(o, w)| (o, Value::String(w)))
        .collect();
    Value::Object(map)
}

pub fn lottery_from_json(outcomes: &Arc<OutcomeSpace>, value: &Value) -> Result<Lottery> {
    let map = object(value, "lottery")?;
    let entries = map
        .iter()
        .map(|(o, w)| Ok((o.as_str(), rational_from_json(w, &format!("lottery weight {o}"))?)))
        .collect::<Result<Vec<_>>>()?;
    Lottery::from_labels(outcomes, entries)
}

fn tiers_to_json(tiers: &[Vec<usize>]) -> Value {
    json!(tiers
        .iter()
        .map(|t| t.iter().map(|&a| act_name(a)).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

/// Table file with acts named `f1, f2, …` in canonical order and one entry
/// per event keyed by its comma-joined labels.
pub fn table_to_json(table: &PreferenceTable) -> Value {
    let acts: Vec<Value> = (0..table.act_count())
        .map(|i| act_to_json(&table.act(i), &act_name(i)))
        .collect();
    let mut prefs = Map::new();
    let space = table.space();
    for bits in 0..(1u64 << space.len()) {
        let key = Event::from_bits(space, bits).key();
        if bits == 0 {
            prefs.insert(key, json!("degenerate"));
        } else {
            prefs.insert(key, tiers_to_json(&table.tiers(bits)));
        }
    }
    let mut out = json!({
        "states": space.labels(),
        "outcomes": table.outcomes().labels(),
        "acts": acts,
        "prefs": prefs,
    });
    if let Some(u) = table.unconditional_tiers() {
        out["unconditional"] = tiers_to_json(&u);
    }
    out
}

fn tiers_from_json(value: &Value, names: &HashMap<String, usize>, what: &str) -> Result<Vec<Vec<usize>>> {
    let outer = value
        .as_array()
        .ok_or_else(|| perr(format!("{what}: expected a list of tiers")))?;
    outer
        .iter()
        .map(|tier| {
            string_list(tier, what)?
                .iter()
                .map(|n| {
                    names
                        .get(n)
                        .copied()
                        .ok_or_else(|| perr(format!("{what}: unknown act {n:?}")))
                })
                .collect()
        })
        .collect()
}

/// Parses a table file. Acts may be listed in any order under any names, but
/// together they must enumerate every act exactly once.
pub fn table_from_json(value: &Value) -> Result<PreferenceTable> {
    let acts_json = field(value, "acts", "table")?
        .as_array()
        .ok_or_else(|| perr("acts: expected an array"))?;
    let (space, outcomes) = match (value.get("states"), value.get("outcomes")) {
        (Some(s), Some(o)) => (
            StateSpace::new(string_list(s, "states")?)?,
            OutcomeSpace::new(string_list(o, "outcomes")?)?,
        ),
        _ => infer_spaces(acts_json)?,
    };
    let count = check_act_cap(space.len(), outcomes.len(), crate::act::DEFAULT_ACT_CAP)?;
    let mut names = HashMap::new();
    let mut seen = vec![false; count];
    for a in acts_json {
        let (name, act) = act_from_json(&space, &outcomes, a)?;
        let idx = act.index();
        if seen[idx] {
            return Err(Error::InvalidTable(format!("act {name:?} duplicates another act")));
        }
        seen[idx] = true;
        if names.insert(name.clone(), idx).is_some() {
            return Err(Error::InvalidTable(format!("act name {name:?} is used twice")));
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::IncompleteTable(format!(
            "the act list omits {}",
            crate::act::Act::new(&space, &outcomes, crate::act::decode(missing, space.len(), outcomes.len()))?
        )));
    }
    let prefs = object(field(value, "prefs", "table")?, "prefs")?;
    let mut tiers: Vec<Option<Vec<Vec<usize>>>> = vec![None; 1 << space.len()];
    let mut present = vec![false; 1 << space.len()];
    for (key, entry) in prefs {
        let event = Event::parse_key(&space, key)?;
        let bits = event.bits() as usize;
        if present[bits] {
            return Err(Error::InvalidTable(format!("event {event} listed twice")));
        }
        present[bits] = true;
        tiers[bits] = match entry {
            Value::String(s) if s == "degenerate" => None,
            other => Some(tiers_from_json(other, &names, &format!("event {event}"))?),
        };
    }
    if let Some(missing) = present.iter().position(|p| !p) {
        return Err(Error::IncompleteTable(format!(
            "no entry for event {}",
            Event::from_bits(&space, missing as u64)
        )));
    }
    let unconditional = match value.get("unconditional") {
        Some(u) => Some(tiers_from_json(u, &names, "unconditional order")?),
        None => None,
    };
    PreferenceTable::from_tiers(&space, &outcomes, tiers, unconditional)
}

/// States from the first act's map and outcomes from all acts, in first-seen order.
fn infer_spaces(acts: &[Value]) -> Result<(Arc<StateSpace>, Arc<OutcomeSpace>)> {
    let first = acts.first().ok_or_else(|| perr("table lists no acts"))?;
    let states: Vec<String> = object(field(first, "map", "act")?, "act map")?
        .keys()
        .cloned()
        .collect();
    let mut outcomes: Vec<String> = Vec::new();
    for a in acts {
        for v in object(field(a, "map", "act")?, "act map")?.values() {
            let o = v.as_str().ok_or_else(|| perr("act map values must be outcome labels"))?;
            if !outcomes.iter().any(|x| x == o) {
                outcomes.push(o.to_string());
            }
        }
    }
    Ok((StateSpace::new(states)?, OutcomeSpace::new(outcomes)?))
}

pub fn table_from_str(text: &str) -> Result<PreferenceTable> {
    table_from_json(&parse_json(text)?)
}

pub fn load_table(path: impl AsRef<Path>) -> Result<PreferenceTable> {
    table_from_str(&read_text(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::derive_table;
    use crate::fixtures::m0;

    #[test]
    fn model_round_trip() {
        let m = m0();
        let text = serde_json::to_string_pretty(&model_to_json(&m)).unwrap();
        assert_eq!(model_from_str(&text).unwrap(), m);
        assert!(text.contains("\"1/2\""));
        assert!(text.contains("\"4/1\""));
    }

    #[test]
    fn missing_support_state_is_named() {
        let text = r#"{"states":["s1","s2"],"outcomes":["a","b"],
            "levels":[{"support":["s1","s2"],"prob":{"s1":"1"},"utility":{"a":0,"b":1}}]}"#;
        let err = model_from_str(text).unwrap_err().to_string();
        assert!(err.contains("s2"), "{err}");
    }

    #[test]
    fn zero_denominator_rejected() {
        let text = r#"{"states":["s1"],"outcomes":["a","b"],
            "levels":[{"support":["s1"],"prob":{"s1":"1/0"},"utility":{"a":0,"b":1}}]}"#;
        let err = model_from_str(text).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        assert!(err.to_string().contains("zero denominator"));
    }

    #[test]
    fn syntax_errors_carry_line() {
        let err = model_from_str("{\n\"states\": [\n}").unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn off_support_probability_must_be_zero() {
        let text = r#"{"states":["s1","s2"],"outcomes":["a","b"],
            "levels":[{"support":["s1"],"prob":{"s1":"1","s2":"1/2"},"utility":{"a":0,"b":1}},
                      {"support":["s2"],"prob":{"s2":"1"},"utility":{"a":0,"b":1}}]}"#;
        assert!(matches!(model_from_str(text), Err(Error::Validation(_))));
    }

    #[test]
    fn table_round_trip() {
        let t = derive_table(&m0(), 1000).unwrap();
        let v = table_to_json(&t);
        assert_eq!(v["prefs"][""], json!("degenerate"));
        assert_eq!(v["acts"][0]["name"], json!("f1"));
        let back = table_from_json(&v).unwrap();
        assert!(t.first_difference(&back).is_none());
        assert_eq!(back.unconditional(), t.unconditional());
    }

    #[test]
    fn table_with_missing_event_is_incomplete() {
        let t = derive_table(&m0(), 1000).unwrap();
        let mut v = table_to_json(&t);
        v["prefs"].as_object_mut().unwrap().remove("s1,s3");
        assert!(matches!(table_from_json(&v), Err(Error::IncompleteTable(_))));
    }

    #[test]
    fn act_and_lottery_round_trip() {
        let m = m0();
        let f = Act::from_labels(m.space(), m.outcomes(), ["b", "a", "c", "a"]).unwrap();
        let (name, back) = act_from_json(m.space(), m.outcomes(), &act_to_json(&f, "f")).unwrap();
        assert_eq!((name.as_str(), back), ("f", f));
        let l = lottery_from_json(m.outcomes(), &json!({"a":"1/2","b":"1/2"})).unwrap();
        assert_eq!(lottery_to_json(&l), json!({"a":"1/2","b":"1/2"}));
    }
}

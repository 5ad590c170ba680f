//! Interaction-log file format (.ijl: JSON lines, one header line then one
//! line per round) and the keyword mapping from free text to speech acts.

use serde::{Deserialize, Serialize};

use crate::game::{ActionId, JointAction, MatrixGame, PlayerRole};
use crate::speech::{PlanCycle, SpeechAct};
use crate::Error;

/// One recorded round: both players' speech, actions, and payoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub index: usize,
    pub speech_row: SpeechAct,
    pub speech_col: SpeechAct,
    pub action_row: ActionId,
    pub action_col: ActionId,
    pub payoff_row: u32,
    pub payoff_col: u32,
}

impl RoundRecord {
    pub fn joint(&self) -> JointAction {
        JointAction {
            row: self.action_row,
            column: self.action_col,
        }
    }

    pub fn speech_of(&self, role: PlayerRole) -> &SpeechAct {
        match role {
            PlayerRole::Row => &self.speech_row,
            PlayerRole::Column => &self.speech_col,
        }
    }

    pub fn action_of(&self, role: PlayerRole) -> ActionId {
        match role {
            PlayerRole::Row => self.action_row,
            PlayerRole::Column => self.action_col,
        }
    }

    pub fn payoff_of(&self, role: PlayerRole) -> u32 {
        match role {
            PlayerRole::Row => self.payoff_row,
            PlayerRole::Column => self.payoff_col,
        }
    }
}

/// A full recorded match between two players.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionLog {
    pub game_id: String,
    pub game: MatrixGame,
    pub rounds: Vec<RoundRecord>,
}

impl InteractionLog {
    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    game_id: String,
    game: MatrixGame,
}

#[derive(Serialize, Deserialize)]
struct SpeechJson {
    kind: String,
    cycle: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RoundLine {
    round: usize,
    z_row: SpeechJson,
    z_col: SpeechJson,
    a_row: String,
    a_col: String,
    u_row: u32,
    u_col: u32,
}

fn speech_to_json(speech: &SpeechAct) -> SpeechJson {
    SpeechJson {
        kind: speech.kind().label().to_string(),
        cycle: speech
            .proposal()
            .map(|plan| plan.steps().iter().map(|j| j.label()).collect())
            .unwrap_or_default(),
    }
}

fn speech_from_json(json: &SpeechJson, line: usize) -> Result<SpeechAct, Error> {
    let parse_err = |msg: String| Error::LogParse { line, msg };
    let kind = crate::speech::SPEECH_KINDS
        .iter()
        .find(|k| k.label() == json.kind)
        .copied()
        .ok_or_else(|| parse_err(format!("unknown speech kind {:?}", json.kind)))?;
    let proposal = if json.cycle.is_empty() {
        None
    } else {
        let steps = json
            .cycle
            .iter()
            .map(|s| {
                JointAction::parse(s)
                    .ok_or_else(|| parse_err(format!("bad joint action {s:?} in cycle")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Some(PlanCycle::new(steps).map_err(|e| parse_err(e.to_string()))?)
    };
    SpeechAct::from_kind(kind, proposal).map_err(|e| parse_err(e.to_string()))
}

/// Serializes a log to .ijl text. The output is deterministic, so identical
/// logs serialize to identical bytes.
pub fn write_log(log: &InteractionLog) -> String {
    let mut out = String::new();
    let header = HeaderLine {
        game_id: log.game_id.clone(),
        game: log.game.clone(),
    };
    out.push_str(&serde_json::to_string(&header).expect("header serializes"));
    out.push('\n');
    for round in &log.rounds {
        let line = RoundLine {
            round: round.index,
            z_row: speech_to_json(&round.speech_row),
            z_col: speech_to_json(&round.speech_col),
            a_row: round.action_row.letter().to_string(),
            a_col: round.action_col.letter().to_string(),
            u_row: round.payoff_row,
            u_col: round.payoff_col,
        };
        out.push_str(&serde_json::to_string(&line).expect("round serializes"));
        out.push('\n');
    }
    out
}

fn parse_action(s: &str, line: usize) -> Result<ActionId, Error> {
    let mut chars = s.chars();
    match (chars.next().and_then(ActionId::parse), chars.next()) {
        (Some(a), None) => Ok(a),
        _ => Err(Error::LogParse {
            line,
            msg: format!("bad action {s:?}"),
        }),
    }
}

/// Parses one .ijl log, validating round contiguity and payoff consistency.
pub fn read_log(text: &str) -> Result<InteractionLog, Error> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (line_no, header_text) = lines.next().ok_or(Error::LogParse {
        line: 1,
        msg: "missing header line".into(),
    })?;
    let header: HeaderLine = serde_json::from_str(header_text).map_err(|e| Error::LogParse {
        line: line_no + 1,
        msg: format!("bad header: {e}"),
    })?;

    let mut rounds = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let parsed: RoundLine = serde_json::from_str(raw).map_err(|e| Error::LogParse {
            line,
            msg: e.to_string(),
        })?;
        if parsed.round != rounds.len() {
            return Err(Error::LogParse {
                line,
                msg: format!("round index {} out of order", parsed.round),
            });
        }
        let action_row = parse_action(&parsed.a_row, line)?;
        let action_col = parse_action(&parsed.a_col, line)?;
        if action_row.role() != PlayerRole::Row || action_col.role() != PlayerRole::Column {
            return Err(Error::LogParse {
                line,
                msg: "action recorded for the wrong seat".into(),
            });
        }
        let joint = JointAction {
            row: action_row,
            column: action_col,
        };
        let (u_row, u_col) = header.game.payoff(joint);
        if (u_row, u_col) != (parsed.u_row, parsed.u_col) {
            return Err(Error::PayoffMismatch {
                round: parsed.round,
            });
        }
        rounds.push(RoundRecord {
            index: parsed.round,
            speech_row: speech_from_json(&parsed.z_row, line)?,
            speech_col: speech_from_json(&parsed.z_col, line)?,
            action_row,
            action_col,
            payoff_row: parsed.u_row,
            payoff_col: parsed.u_col,
        });
    }
    Ok(InteractionLog {
        game_id: header.game_id,
        game: header.game,
        rounds,
    })
}

/// Serializes a corpus: logs concatenated, each with its own header line.
pub fn write_corpus(logs: &[InteractionLog]) -> String {
    logs.iter().map(write_log).collect()
}

/// Reads a corpus of concatenated logs. Header lines are recognized by their
/// leading field name.
pub fn read_corpus(text: &str) -> Result<Vec<InteractionLog>, Error> {
    let mut chunks: Vec<String> = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        if line.trim_start().starts_with("{\"game_id\"") {
            chunks.push(String::new());
        }
        let Some(current) = chunks.last_mut() else {
            return Err(Error::LogParse {
                line: 1,
                msg: "corpus does not start with a header line".into(),
            });
        };
        current.push_str(line);
        current.push('\n');
    }
    chunks.iter().map(|chunk| read_log(chunk)).collect()
}

fn fragment_words(fragment: &str) -> Vec<String> {
    fragment
        .split(|c: char| !c.is_ascii_alphanumeric() && c != '\'')
        .filter(|w| !w.is_empty())
        .map(|w| w.trim_matches('\'').to_string())
        .collect()
}

fn joint_tokens(words: &[String]) -> Vec<JointAction> {
    words
        .iter()
        .filter_map(|w| {
            if w.len() == 2 {
                JointAction::parse(w)
            } else {
                None
            }
        })
        .collect()
}

fn classify_fragment(fragment: &str) -> Option<SpeechAct> {
    let words = fragment_words(fragment);
    if words.is_empty() {
        return None;
    }
    let has_word = |list: &[&str]| words.iter().any(|w| list.contains(&w.as_str()));
    let has_phrase = |list: &[&str]| list.iter().any(|p| fragment.contains(p));

    if has_word(&["play", "playing", "alternate", "alternating"]) {
        let tokens = joint_tokens(&words);
        if has_word(&["alternate", "alternating"]) && tokens.len() >= 2 {
            return Some(SpeechAct::Propose(PlanCycle::alternating(
                tokens[0], tokens[1],
            )));
        }
        if let Some(&joint) = tokens.first() {
            return Some(SpeechAct::Propose(PlanCycle::pure(joint)));
        }
    }
    if has_word(&["punish", "punished", "punishment", "obey"])
        || has_phrase(&["or else", "do as i say"])
    {
        return Some(SpeechAct::Threat);
    }
    if has_word(&["forgive", "forgiven", "forgave"]) {
        return Some(SpeechAct::Forgive);
    }
    if has_word(&["betray", "betrayed", "liar", "lied", "lie", "cheat", "cheater", "traitor"]) {
        return Some(SpeechAct::Accuse);
    }
    if has_word(&["curse", "idiot", "stupid", "fool", "loser"]) || has_phrase(&["in your face"]) {
        return Some(SpeechAct::Insult);
    }
    if has_word(&["excellent", "great", "good", "nice", "perfect", "awesome", "thanks", "thank"])
        || has_phrase(&["well done"])
    {
        return Some(SpeechAct::Praise);
    }
    None
}

/// Maps free text onto the closed speech vocabulary, one act per recognized
/// sentence fragment. Unrecognized fragments contribute nothing.
pub fn parse_speech_acts(text: &str) -> Vec<SpeechAct> {
    let lowered = text.to_lowercase();
    let trimmed = lowered.trim();
    if trimmed.is_empty() || trimmed == "none" {
        return vec![SpeechAct::Silence];
    }
    let acts: Vec<SpeechAct> = trimmed
        .split(['.', '!', '?', ';'])
        .filter_map(classify_fragment)
        .collect();
    if acts.is_empty() {
        vec![SpeechAct::Silence]
    } else {
        acts
    }
}

/// The primary speech act of an utterance: its first proposal when one
/// exists, otherwise the first recognized act, otherwise silence.
pub fn parse_speech(text: &str) -> SpeechAct {
    let acts = parse_speech_acts(text);
    acts.iter()
        .find(|a| a.proposal().is_some())
        .or_else(|| acts.first())
        .cloned()
        .unwrap_or(SpeechAct::Silence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn joint(s: &str) -> JointAction {
        JointAction::parse(s).unwrap()
    }

    fn sample_log(rounds: usize) -> InteractionLog {
        let game = MatrixGame::prisoners_dilemma();
        let records = (0..rounds)
            .map(|i| {
                let joint = JointAction {
                    row: if i % 2 == 0 { ActionId::A } else { ActionId::B },
                    column: ActionId::C,
                };
                let (u_row, u_col) = game.payoff(joint);
                RoundRecord {
                    index: i,
                    speech_row: if i == 0 {
                        SpeechAct::Propose(PlanCycle::alternating(
                            JointAction::parse("AC").unwrap(),
                            JointAction::parse("BC").unwrap(),
                        ))
                    } else {
                        SpeechAct::Silence
                    },
                    speech_col: SpeechAct::Silence,
                    action_row: joint.row,
                    action_col: joint.column,
                    payoff_row: u_row,
                    payoff_col: u_col,
                }
            })
            .collect();
        InteractionLog {
            game_id: "g1".into(),
            game,
            rounds: records,
        }
    }

    #[test]
    fn empty_log_round_trips() {
        let log = InteractionLog {
            game_id: "empty".into(),
            game: MatrixGame::prisoners_dilemma(),
            rounds: vec![],
        };
        let text = write_log(&log);
        assert_eq!(read_log(&text).unwrap(), log);
    }

    #[test]
    fn log_round_trips_byte_stable() {
        let log = sample_log(51);
        let text = write_log(&log);
        let reread = read_log(&text).unwrap();
        assert_eq!(reread, log);
        assert_eq!(write_log(&reread), text);
    }

    #[test]
    fn corrupted_payoff_is_rejected_at_its_round() {
        let log = sample_log(5);
        let mut text = write_log(&log);
        // Round 1 is BC: row payoff 100. Corrupt it to 101.
        text = text.replace("\"u_row\":100,\"u_col\":0", "\"u_row\":101,\"u_col\":0");
        match read_log(&text) {
            Err(Error::PayoffMismatch { round }) => assert_eq!(round, 1),
            other => panic!("expected payoff mismatch, got {other:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let log = sample_log(3);
        let mut text = write_log(&log);
        text.push_str("{not json}\n");
        match read_log(&text) {
            Err(Error::LogParse { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn corpus_round_trips() {
        let corpus = vec![sample_log(3), sample_log(2)];
        let text = write_corpus(&corpus);
        let reread = read_corpus(&text).unwrap();
        assert_eq!(reread.len(), 2);
        assert_eq!(reread[0], corpus[0]);
        assert_eq!(write_corpus(&reread), text);
    }

    #[test]
    fn parse_speech_published_utterances() {
        assert_eq!(
            parse_speech("Let's always play BD."),
            SpeechAct::Propose(PlanCycle::pure(joint("BD")))
        );
        assert_eq!(parse_speech("I forgive you."), SpeechAct::Forgive);
        assert_eq!(parse_speech(""), SpeechAct::Silence);
        assert_eq!(parse_speech("None"), SpeechAct::Silence);
        assert_eq!(parse_speech("You betrayed me. Curse you."), SpeechAct::Accuse);
    }

    #[test]
    fn parse_speech_compound_utterance() {
        let text = "In your face! I forgive you. Let's alternate between AC and BC. \
                    This round, let's play BC. Do as I say or I will punish you.";
        let acts = parse_speech_acts(text);
        assert_eq!(acts.len(), 5);
        assert_eq!(acts[0], SpeechAct::Insult);
        assert_eq!(acts[1], SpeechAct::Forgive);
        assert_eq!(
            acts[2],
            SpeechAct::Propose(PlanCycle::alternating(joint("AC"), joint("BC")))
        );
        assert_eq!(acts[3], SpeechAct::Propose(PlanCycle::pure(joint("BC"))));
        assert_eq!(acts[4], SpeechAct::Threat);
        // Primary act is the first proposal.
        assert_eq!(
            parse_speech(text),
            SpeechAct::Propose(PlanCycle::alternating(joint("AC"), joint("BC")))
        );
    }

    #[test]
    fn parse_speech_is_total() {
        for text in ["garbage text with no keywords", "42", "!!!", "believe me"] {
            // Never panics, unmatched text maps to silence.
            assert_eq!(parse_speech(text), SpeechAct::Silence);
        }
        assert_eq!(parse_speech("Excellent."), SpeechAct::Praise);
    }
}

use super::setting::{Action, Setting};

/// A numeric token: its integer value when it is a whole number.
fn numeric_tokens(text: &str) -> Vec<Option<i64>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let negative = chars[i] == '-'
            && chars.get(i + 1).is_some_and(char::is_ascii_digit)
            && (i == 0 || !chars[i - 1].is_alphanumeric());
        if !(chars[i].is_ascii_digit() || negative) {
            i += 1;
            continue;
        }
        let start = i;
        i += 1;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let int_part: String = chars[start..i].iter().collect();
        let mut whole = true;
        if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
            i += 1;
            let frac_start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            whole = chars[frac_start..i].iter().all(|&c| c == '0');
        }
        out.push(if whole { int_part.parse().ok() } else { None });
    }
    out
}

fn is_word_boundary(c: Option<char>) -> bool {
    c.is_none_or(|c| !c.is_alphanumeric())
}

/// Final action named in a free-text answer, or `None` when the text has
/// no whole number (or label) from the action set.
pub fn parse_response(raw: &str, setting: &Setting) -> Option<Action> {
    let numeric = setting.actions.iter().all(|a| matches!(a, Action::Int(_)));
    if numeric {
        return numeric_tokens(raw)
            .into_iter()
            .rev()
            .flatten()
            .map(Action::Int)
            .find(|a| setting.actions.contains(a));
    }
    let lower = raw.to_lowercase();
    let mut best: Option<(usize, &Action)> = None;
    for a in &setting.actions {
        let needle = a.to_string().to_lowercase();
        for (pos, _) in lower.match_indices(&needle) {
            let before = lower[..pos].chars().next_back();
            let after = lower[pos + needle.len()..].chars().next();
            if is_word_boundary(before) && is_word_boundary(after) && best.is_none_or(|(p, _)| pos >= p) {
                best = Some((pos, a));
            }
        }
    }
    best.map(|(_, a)| a.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn money() -> Setting {
        Setting::new("x", (11..=20).map(Action::Int).collect(), None).unwrap()
    }

    #[test]
    fn examples() {
        let s = money();
        assert_eq!(parse_response("I request 17 shekels", &s), Some(Action::Int(17)));
        assert_eq!(parse_response("about 19.5", &s), None);
        assert_eq!(parse_response("21", &s), None);
        assert_eq!(parse_response("Between 11-20 I'd go 18. Final: 19", &s), Some(Action::Int(19)));
        assert_eq!(parse_response("17.0", &s), Some(Action::Int(17)));
        assert_eq!(parse_response("I pick 18. Others pick 25.", &s), Some(Action::Int(18)));
    }

    #[test]
    fn labels() {
        let s = Setting::new("y", vec![Action::Label("Left".into()), Action::Label("Right".into())], None).unwrap();
        assert_eq!(parse_response("Right seems greedy, so LEFT.", &s), Some(Action::Label("Left".into())));
        assert_eq!(parse_response("Rightward", &s), None);
    }
}

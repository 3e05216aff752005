//! CISTEM stemmer for German (Weissweiler & Fraser, 2017).
//!
//! Mirrors the published reference implementation step for step,
//! including its quirks: umlauts are folded, `ß` becomes `ss`, a `ge`
//! prefix is dropped when at least four characters follow, and the
//! final `t` is only stripped from words that did not start with an
//! uppercase letter (unless running case-insensitively).

/// Placeholder characters for the multi-letter units `sch`, `ei`, `ie`
/// and for the second half of a doubled letter.
const SCH: char = '$';
const EI: char = '%';
const IE: char = '&';
const DOUBLE: char = '*';

pub fn cistem_stem(word: &str, case_insensitive: bool) -> String {
    let Some(first) = word.chars().next() else {
        return String::new();
    };
    let upper = first.is_uppercase();

    let mut chars: Vec<char> = Vec::with_capacity(word.len());
    for c in word.to_lowercase().chars() {
        match c {
            'ü' => chars.push('u'),
            'ö' => chars.push('o'),
            'ä' => chars.push('a'),
            'ß' => chars.extend(['s', 's']),
            c => chars.push(c),
        }
    }
    if chars.len() >= 6 && chars[0] == 'g' && chars[1] == 'e' {
        chars.drain(..2);
    }

    let mut chars = replace_to(&chars);
    let strip_t = !upper || case_insensitive;
    while chars.len() > 3 {
        let n = chars.len();
        if n > 5 {
            if chars[n - 2] == 'e' && matches!(chars[n - 1], 'm' | 'r') {
                chars.truncate(n - 2);
                continue;
            }
            if chars[n - 2] == 'n' && chars[n - 1] == 'd' {
                chars.truncate(n - 2);
                continue;
            }
        }
        if strip_t && chars[n - 1] == 't' {
            chars.truncate(n - 1);
            continue;
        }
        if matches!(chars[n - 1], 'e' | 's' | 'n') {
            chars.truncate(n - 1);
            continue;
        }
        break;
    }
    replace_back(&chars)
}

fn replace_to(chars: &[char]) -> Vec<char> {
    let mut out = replace_seq(chars, &['s', 'c', 'h'], SCH);
    out = replace_seq(&out, &['e', 'i'], EI);
    out = replace_seq(&out, &['i', 'e'], IE);

    // (.)\1 -> \1*, scanning left to right without overlap
    let mut doubled = Vec::with_capacity(out.len());
    let mut i = 0;
    while i < out.len() {
        if i + 1 < out.len() && out[i] == out[i + 1] && out[i] != '\n' {
            doubled.extend([out[i], DOUBLE]);
            i += 2;
        } else {
            doubled.push(out[i]);
            i += 1;
        }
    }
    doubled
}

fn replace_back(chars: &[char]) -> String {
    let mut out = String::with_capacity(chars.len() + 4);
    let mut i = 0;
    while i < chars.len() {
        if i + 1 < chars.len() && chars[i + 1] == DOUBLE && chars[i] != '\n' {
            out.push(chars[i]);
            out.push(chars[i]);
            i += 2;
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out.replace(EI, "ei").replace(IE, "ie").replace(SCH, "sch")
}

fn replace_seq(chars: &[char], pattern: &[char], with: char) -> Vec<char> {
    let mut out = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        if chars[i..].starts_with(pattern) {
            out.push(with);
            i += pattern.len();
        } else {
            out.push(chars[i]);
            i += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_examples() {
        assert_eq!(cistem_stem("und", false), "und");
        assert_eq!(cistem_stem("gelaufen", false), "lauf");
        assert_eq!(cistem_stem("Speicherbehältern", false), "speicherbehalt");
        assert_eq!(cistem_stem("Grenzpostens", false), "grenzpost");
        assert_eq!(cistem_stem("Ausgefeiltere", false), "ausgefeilt");
        assert_eq!(cistem_stem("Speicherbehältern", true), "speicherbehal");
        assert_eq!(cistem_stem("Grenzpostens", true), "grenzpo");
        assert_eq!(cistem_stem("Ausgefeiltere", true), "ausgefeil");
    }

    #[test]
    fn short_and_empty_words() {
        assert_eq!(cistem_stem("", false), "");
        assert_eq!(cistem_stem("ge", false), "ge");
        assert_eq!(cistem_stem("es", false), "es");
    }

    #[test]
    fn ge_prefix_needs_four_following_chars() {
        // "gehen": only three characters after "ge", so the prefix stays.
        assert_eq!(cistem_stem("gehen", false), "geh");
        assert_eq!(cistem_stem("gegangen", false), "gang");
    }

    #[test]
    fn doubled_letters_survive() {
        assert_eq!(cistem_stem("Schiffen", false), "schiff");
        assert_eq!(cistem_stem("aaaa", false), "aaaa");
    }
}

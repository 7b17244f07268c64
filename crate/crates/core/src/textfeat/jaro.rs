use super::tokenize;

const PREFIX_SCALE: f64 = 0.1;
const MAX_PREFIX: usize = 4;

/// Jaro similarity over Unicode scalar values. Two empty strings score 1.
pub fn jaro(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }

    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut a_matched = vec![false; a.len()];
    let mut b_matched = vec![false; b.len()];
    let mut matches = 0usize;
    for (i, ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_matched[j] && b[j] == *ca {
                a_matched[i] = true;
                b_matched[j] = true;
                matches += 1;
                break;
            }
        }
    }
    if matches == 0 {
        return 0.0;
    }

    let a_seq = a.iter().zip(&a_matched).filter(|(_, &m)| m).map(|(c, _)| c);
    let b_seq = b.iter().zip(&b_matched).filter(|(_, &m)| m).map(|(c, _)| c);
    let half_transpositions = a_seq.zip(b_seq).filter(|(x, y)| x != y).count();
    let m = matches as f64;
    let t = (half_transpositions / 2) as f64;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

/// Jaro similarity boosted by the length of the common prefix (scale 0.1,
/// prefix capped at 4 characters).
pub fn jaro_winkler(a: &str, b: &str) -> f64 {
    let j = jaro(a, b);
    let prefix = a
        .chars()
        .zip(b.chars())
        .take(MAX_PREFIX)
        .take_while(|(x, y)| x == y)
        .count();
    j + prefix as f64 * PREFIX_SCALE * (1.0 - j)
}

/// True when one name abbreviates the other: its letters are exactly the
/// initials of the other's words, or it is an all-caps token whose letters
/// all start words of the other.
pub fn abbreviation_pair(a: &str, b: &str) -> bool {
    abbreviates(a, b) || abbreviates(b, a)
}

fn abbreviates(short: &str, long: &str) -> bool {
    let words = tokenize(long);
    if words.len() < 2 {
        return false;
    }
    let initials: Vec<char> = words.tokens().iter().filter_map(|w| w.chars().next()).collect();
    let letters: Vec<char> = short
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect();
    if letters.is_empty() {
        return false;
    }
    if letters == initials {
        return true;
    }
    let trimmed = short.trim();
    let all_caps = trimmed.chars().count() >= 2
        && !trimmed.contains(char::is_whitespace)
        && trimmed.chars().all(|c| c.is_uppercase() || !c.is_alphabetic())
        && trimmed.chars().any(char::is_alphabetic);
    all_caps && letters.iter().all(|c| initials.contains(c))
}

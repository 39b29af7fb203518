//! Double Metaphone phonetic encoding.
//!
//! A port of the original rule set (including its Germanic, Slavic, Romance
//! and Greek special cases). Each word yields a primary and a secondary code;
//! both are truncated to [`MAX_CODE_LEN`] characters.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::PhoneticError;

/// Classic truncation length for Double Metaphone codes.
pub const MAX_CODE_LEN: usize = 4;

/// Primary and secondary Double Metaphone codes of a word.
///
/// When a word has no alternate pronunciation the secondary code equals the
/// primary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhoneticCode {
    pub primary: String,
    pub secondary: String,
}

impl PhoneticCode {
    pub fn has_alternate(&self) -> bool {
        self.primary != self.secondary
    }
}

impl fmt::Display for PhoneticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.has_alternate() {
            write!(f, "{}/{}", self.primary, self.secondary)
        } else {
            f.write_str(&self.primary)
        }
    }
}

/// Encode a single word.
///
/// Apostrophes are dropped before encoding ("don't" encodes as "dont").
/// Non-letter characters inside an otherwise alphabetic word are skipped.
pub fn encode_double_metaphone(word: &str) -> Result<PhoneticCode, PhoneticError> {
    let cleaned: String = word.chars().filter(|c| *c != '\'' && *c != '’').collect();
    if cleaned.trim().is_empty() || !cleaned.chars().any(char::is_alphabetic) {
        return Err(PhoneticError::InvalidWord(word.to_string()));
    }
    let mut encoder = Encoder::new(&cleaned);
    encoder.run();
    let (primary, secondary) = encoder.finish();
    Ok(PhoneticCode { primary, secondary })
}

struct Encoder {
    buf: Vec<char>,
    length: usize,
    last: isize,
    slavo_germanic: bool,
    primary: String,
    secondary: String,
}

fn is_vowel_char(c: char) -> bool {
    matches!(c, 'A' | 'E' | 'I' | 'O' | 'U' | 'Y')
}

impl Encoder {
    fn new(word: &str) -> Self {
        let mut buf: Vec<char> = word
            .chars()
            .map(|c| match c {
                'ç' | 'Ç' => 'Ç',
                'ñ' | 'Ñ' => 'Ñ',
                other => other.to_ascii_uppercase(),
            })
            .collect();
        let length = buf.len();
        // Padding lets lookahead match word-final " " contexts.
        buf.extend(std::iter::repeat_n(' ', 5));
        let upper: String = buf[..length].iter().collect();
        let slavo_germanic = upper.contains('W')
            || upper.contains('K')
            || upper.contains("CZ")
            || upper.contains("WITZ");
        Encoder {
            buf,
            length,
            last: length as isize - 1,
            slavo_germanic,
            primary: String::new(),
            secondary: String::new(),
        }
    }

    fn at(&self, pos: isize) -> char {
        if pos < 0 || pos as usize >= self.buf.len() {
            '\0'
        } else {
            self.buf[pos as usize]
        }
    }

    fn is_vowel(&self, pos: isize) -> bool {
        is_vowel_char(self.at(pos))
    }

    fn string_at(&self, start: isize, options: &[&str]) -> bool {
        if start < 0 || start as usize >= self.buf.len() {
            return false;
        }
        let start = start as usize;
        options.iter().any(|opt| {
            let n = opt.chars().count();
            start + n <= self.buf.len() && self.buf[start..start + n].iter().copied().eq(opt.chars())
        })
    }

    fn add(&mut self, code: &str) {
        self.primary.push_str(code);
        self.secondary.push_str(code);
    }

    fn add2(&mut self, primary: &str, secondary: &str) {
        self.primary.push_str(primary);
        self.secondary.push_str(secondary);
    }

    fn finish(mut self) -> (String, String) {
        self.primary.truncate(MAX_CODE_LEN);
        self.secondary.truncate(MAX_CODE_LEN);
        (self.primary, self.secondary)
    }

    fn run(&mut self) {
        let mut cur: isize = 0;
        if self.string_at(0, &["GN", "KN", "PN", "WR", "PS"]) {
            cur += 1;
        }
        // Initial 'X' is pronounced 'Z' (Xavier).
        if self.at(0) == 'X' {
            self.add("S");
            cur += 1;
        }

        while self.primary.len() < MAX_CODE_LEN || self.secondary.len() < MAX_CODE_LEN {
            if cur >= self.length as isize {
                break;
            }
            cur = match self.at(cur) {
                'A' | 'E' | 'I' | 'O' | 'U' | 'Y' => {
                    if cur == 0 {
                        self.add("A");
                    }
                    cur + 1
                }
                'B' => {
                    self.add("P");
                    if self.at(cur + 1) == 'B' {
                        cur + 2
                    } else {
                        cur + 1
                    }
                }
                'Ç' => {
                    self.add("S");
                    cur + 1
                }
                'C' => self.letter_c(cur),
                'D' => self.letter_d(cur),
                'F' => {
                    self.add("F");
                    if self.at(cur + 1) == 'F' {
                        cur + 2
                    } else {
                        cur + 1
                    }
                }
                'G' => self.letter_g(cur),
                'H' => {
                    if (cur == 0 || self.is_vowel(cur - 1)) && self.is_vowel(cur + 1) {
                        self.add("H");
                        cur + 2
                    } else {
                        cur + 1
                    }
                }
                'J' => self.letter_j(cur),
                'K' => {
                    self.add("K");
                    if self.at(cur + 1) == 'K' {
                        cur + 2
                    } else {
                        cur + 1
                    }
                }
                'L' => self.letter_l(cur),
                'M' => {
                    self.add("M");
                    let silent_b = self.string_at(cur - 1, &["UMB"])
                        && (cur + 1 == self.last || self.string_at(cur + 2, &["ER"]));
                    if silent_b || self.at(cur + 1) == 'M' {
                        cur + 2
                    } else {
                        cur + 1
                    }
                }
                'N' => {
                    self.add("N");
                    if self.at(cur + 1) == 'N' {
                        cur + 2
                    } else {
                        cur + 1
                    }
                }
                'Ñ' => {
                    self.add("N");
                    cur + 1
                }
                'P' => {
                    if self.at(cur + 1) == 'H' {
                        self.add("F");
                        cur + 2
                    } else {
                        self.add("P");
                        // "campbell", "raspberry"
                        if self.string_at(cur + 1, &["P", "B"]) {
                            cur + 2
                        } else {
                            cur + 1
                        }
                    }
                }
                'Q' => {
                    self.add("K");
                    if self.at(cur + 1) == 'Q' {
                        cur + 2
                    } else {
                        cur + 1
                    }
                }
                'R' => {
                    // French "rogier", but not "hochmeier".
                    if cur == self.last
                        && !self.slavo_germanic
                        && self.string_at(cur - 2, &["IE"])
                        && !self.string_at(cur - 4, &["ME", "MA"])
                    {
                        self.add2("", "R");
                    } else {
                        self.add("R");
                    }
                    if self.at(cur + 1) == 'R' {
                        cur + 2
                    } else {
                        cur + 1
                    }
                }
                'S' => self.letter_s(cur),
                'T' => self.letter_t(cur),
                'V' => {
                    self.add("F");
                    if self.at(cur + 1) == 'V' {
                        cur + 2
                    } else {
                        cur + 1
                    }
                }
                'W' => self.letter_w(cur),
                'X' => {
                    // French "breaux".
                    let silent = cur == self.last
                        && (self.string_at(cur - 3, &["IAU", "EAU"])
                            || self.string_at(cur - 2, &["AU", "OU"]));
                    if !silent {
                        self.add("KS");
                    }
                    if self.string_at(cur + 1, &["C", "X"]) {
                        cur + 2
                    } else {
                        cur + 1
                    }
                }
                'Z' => self.letter_z(cur),
                _ => cur + 1,
            };
        }
    }

    fn letter_c(&mut self, cur: isize) -> isize {
        // Germanic "bacher", "macher".
        if cur > 1
            && !self.is_vowel(cur - 2)
            && self.string_at(cur - 1, &["ACH"])
            && self.at(cur + 2) != 'I'
            && (self.at(cur + 2) != 'E' || self.string_at(cur - 2, &["BACHER", "MACHER"]))
        {
            self.add("K");
            return cur + 2;
        }
        if cur == 0 && self.string_at(cur, &["CAESAR"]) {
            self.add("S");
            return cur + 2;
        }
        // Italian "chianti".
        if self.string_at(cur, &["CHIA"]) {
            self.add("K");
            return cur + 2;
        }
        if self.string_at(cur, &["CH"]) {
            // "michael"
            if cur > 0 && self.string_at(cur, &["CHAE"]) {
                self.add2("K", "X");
                return cur + 2;
            }
            // Greek roots: "chemistry", "chorus".
            if cur == 0
                && (self.string_at(cur + 1, &["HARAC", "HARIS"])
                    || self.string_at(cur + 1, &["HOR", "HYM", "HIA", "HEM"]))
                && !self.string_at(0, &["CHORE"])
            {
                self.add("K");
                return cur + 2;
            }
            let kh_sound = self.string_at(0, &["VAN ", "VON "])
                || self.string_at(0, &["SCH"])
                || self.string_at(cur - 2, &["ORCHES", "ARCHIT", "ORCHID"])
                || self.string_at(cur + 2, &["T", "S"])
                || ((self.string_at(cur - 1, &["A", "O", "U", "E"]) || cur == 0)
                    && self.string_at(cur + 2, &["L", "R", "N", "M", "B", "H", "F", "V", "W", " "]));
            if kh_sound {
                self.add("K");
            } else if cur > 0 {
                if self.string_at(0, &["MC"]) {
                    self.add("K");
                } else {
                    self.add2("X", "K");
                }
            } else {
                self.add("X");
            }
            return cur + 2;
        }
        // "czerny"
        if self.string_at(cur, &["CZ"]) && !self.string_at(cur - 2, &["WICZ"]) {
            self.add2("S", "X");
            return cur + 2;
        }
        // "focaccia"
        if self.string_at(cur + 1, &["CIA"]) {
            self.add("X");
            return cur + 3;
        }
        // Double C, but not "McClellan".
        if self.string_at(cur, &["CC"]) && !(cur == 1 && self.at(0) == 'M') {
            if self.string_at(cur + 2, &["I", "E", "H"]) && !self.string_at(cur + 2, &["HU"]) {
                // "accident", "succeed"
                if (cur == 1 && self.at(cur - 1) == 'A') || self.string_at(cur - 1, &["UCCEE", "UCCES"]) {
                    self.add("KS");
                } else {
                    // "bacci", "bertucci"
                    self.add("X");
                }
                return cur + 3;
            }
            self.add("K");
            return cur + 2;
        }
        if self.string_at(cur, &["CK", "CG", "CQ"]) {
            self.add("K");
            return cur + 2;
        }
        if self.string_at(cur, &["CI", "CE", "CY"]) {
            if self.string_at(cur, &["CIO", "CIE", "CIA"]) {
                self.add2("S", "X");
            } else {
                self.add("S");
            }
            return cur + 2;
        }
        self.add("K");
        // "mac caffrey", "mac gregor"
        if self.string_at(cur + 1, &[" C", " Q", " G"]) {
            cur + 3
        } else if self.string_at(cur + 1, &["C", "K", "Q"]) && !self.string_at(cur + 1, &["CE", "CI"]) {
            cur + 2
        } else {
            cur + 1
        }
    }

    fn letter_d(&mut self, cur: isize) -> isize {
        if self.string_at(cur, &["DG"]) {
            if self.string_at(cur + 2, &["I", "E", "Y"]) {
                // "edge"
                self.add("J");
                return cur + 3;
            }
            // "edgar"
            self.add("TK");
            return cur + 2;
        }
        self.add("T");
        if self.string_at(cur, &["DT", "DD"]) {
            cur + 2
        } else {
            cur + 1
        }
    }

    fn letter_g(&mut self, cur: isize) -> isize {
        if self.at(cur + 1) == 'H' {
            if cur > 0 && !self.is_vowel(cur - 1) {
                self.add("K");
                return cur + 2;
            }
            if cur < 3 && cur == 0 {
                // "ghislane", "ghiradelli"
                if self.at(cur + 2) == 'I' {
                    self.add("J");
                } else {
                    self.add("K");
                }
                return cur + 2;
            }
            // Parker's rule: "hugh", "bough", "broughton".
            if (cur > 1 && self.string_at(cur - 2, &["B", "H", "D"]))
                || (cur > 2 && self.string_at(cur - 3, &["B", "H", "D"]))
                || (cur > 3 && self.string_at(cur - 4, &["B", "H"]))
            {
                return cur + 2;
            }
            // "laugh", "cough", "rough", "tough"
            if cur > 2 && self.at(cur - 1) == 'U' && self.string_at(cur - 3, &["C", "G", "L", "R", "T"]) {
                self.add("F");
            } else if cur > 0 && self.at(cur - 1) != 'I' {
                self.add("K");
            }
            return cur + 2;
        }

        if self.at(cur + 1) == 'N' {
            if cur == 1 && self.is_vowel(0) && !self.slavo_germanic {
                self.add2("KN", "N");
            } else if !self.string_at(cur + 2, &["EY"]) && self.at(cur + 1) != 'Y' && !self.slavo_germanic {
                // not "cagney"
                self.add2("N", "KN");
            } else {
                self.add("KN");
            }
            return cur + 2;
        }

        // "tagliaro"
        if self.string_at(cur + 1, &["LI"]) && !self.slavo_germanic {
            self.add2("KL", "L");
            return cur + 2;
        }

        // -ges-, -gep-, -gel-, -gie- at the beginning
        if cur == 0
            && (self.at(cur + 1) == 'Y'
                || self.string_at(
                    cur + 1,
                    &["ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER"],
                ))
        {
            self.add2("K", "J");
            return cur + 2;
        }

        // -ger-, -gy-
        if (self.string_at(cur + 1, &["ER"]) || self.at(cur + 1) == 'Y')
            && !self.string_at(0, &["DANGER", "RANGER", "MANGER"])
            && !self.string_at(cur - 1, &["E", "I"])
            && !self.string_at(cur - 1, &["RGY", "OGY"])
        {
            self.add2("K", "J");
            return cur + 2;
        }

        // Italian "biaggi"
        if self.string_at(cur + 1, &["E", "I", "Y"]) || self.string_at(cur - 1, &["AGGI", "OGGI"]) {
            if self.string_at(0, &["VAN ", "VON "]) || self.string_at(0, &["SCH"]) || self.string_at(cur + 1, &["ET"]) {
                self.add("K");
            } else if self.string_at(cur + 1, &["IER "]) {
                self.add("J");
            } else {
                self.add2("J", "K");
            }
            return cur + 2;
        }

        self.add("K");
        if self.at(cur + 1) == 'G' {
            cur + 2
        } else {
            cur + 1
        }
    }

    fn letter_j(&mut self, cur: isize) -> isize {
        // Spanish "jose", "san jacinto"
        if self.string_at(cur, &["JOSE"]) || self.string_at(0, &["SAN "]) {
            if (cur == 0 && self.at(cur + 4) == ' ') || self.string_at(0, &["SAN "]) {
                self.add("H");
            } else {
                self.add2("J", "H");
            }
            return cur + 1;
        }

        if cur == 0 && !self.string_at(cur, &["JOSE"]) {
            // "Yankelovich" / "Jankelowicz"
            self.add2("J", "A");
        } else if self.is_vowel(cur - 1)
            && !self.slavo_germanic
            && (self.at(cur + 1) == 'A' || self.at(cur + 1) == 'O')
        {
            // Spanish "bajador"
            self.add2("J", "H");
        } else if cur == self.last {
            self.add2("J", "");
        } else if !self.string_at(cur + 1, &["L", "T", "K", "S", "N", "M", "B", "Z"])
            && !self.string_at(cur - 1, &["S", "K", "L"])
        {
            self.add("J");
        }

        if self.at(cur + 1) == 'J' {
            cur + 2
        } else {
            cur + 1
        }
    }

    fn letter_l(&mut self, cur: isize) -> isize {
        if self.at(cur + 1) == 'L' {
            // Spanish "cabrillo", "gallegos"
            let spanish = (cur == self.length as isize - 3 && self.string_at(cur - 1, &["ILLO", "ILLA", "ALLE"]))
                || ((self.string_at(self.last - 1, &["AS", "OS"]) || self.string_at(self.last, &["A", "O"]))
                    && self.string_at(cur - 1, &["ALLE"]));
            if spanish {
                self.add2("L", "");
            } else {
                self.add("L");
            }
            return cur + 2;
        }
        self.add("L");
        cur + 1
    }

    fn letter_s(&mut self, cur: isize) -> isize {
        // "island", "isle", "carlisle", "carlysle"
        if self.string_at(cur - 1, &["ISL", "YSL"]) {
            return cur + 1;
        }
        // "sugar-"
        if cur == 0 && self.string_at(cur, &["SUGAR"]) {
            self.add2("X", "S");
            return cur + 1;
        }
        if self.string_at(cur, &["SH"]) {
            if self.string_at(cur + 1, &["HEIM", "HOEK", "HOLM", "HOLZ"]) {
                self.add("S");
            } else {
                self.add("X");
            }
            return cur + 2;
        }
        // Italian and Armenian
        if self.string_at(cur, &["SIO", "SIA"]) || self.string_at(cur, &["SIAN"]) {
            if self.slavo_germanic {
                self.add("S");
            } else {
                self.add2("S", "X");
            }
            return cur + 3;
        }
        // "smith" matches "schmidt", "snider" matches "schneider"; Slavic -sz-.
        if (cur == 0 && self.string_at(cur + 1, &["M", "N", "L", "W"])) || self.string_at(cur + 1, &["Z"]) {
            self.add2("S", "X");
            return if self.string_at(cur + 1, &["Z"]) { cur + 2 } else { cur + 1 };
        }
        if self.string_at(cur, &["SC"]) {
            // Schlesinger's rule
            if self.at(cur + 2) == 'H' {
                // Dutch "school", "schooner"
                if self.string_at(cur + 3, &["OO", "ER", "EN", "UY", "ED", "EM"]) {
                    // "schermerhorn", "schenker"
                    if self.string_at(cur + 3, &["ER", "EN"]) {
                        self.add2("X", "SK");
                    } else {
                        self.add("SK");
                    }
                } else if cur == 0 && !self.is_vowel(3) && self.at(3) != 'W' {
                    self.add2("X", "S");
                } else {
                    self.add("X");
                }
                return cur + 3;
            }
            if self.string_at(cur + 2, &["I", "E", "Y"]) {
                self.add("S");
            } else {
                self.add("SK");
            }
            return cur + 3;
        }
        // French "resnais", "artois"
        if cur == self.last && self.string_at(cur - 2, &["AI", "OI"]) {
            self.add2("", "S");
        } else {
            self.add("S");
        }
        if self.string_at(cur + 1, &["S", "Z"]) {
            cur + 2
        } else {
            cur + 1
        }
    }

    fn letter_t(&mut self, cur: isize) -> isize {
        if self.string_at(cur, &["TION"]) {
            self.add("X");
            return cur + 3;
        }
        if self.string_at(cur, &["TIA", "TCH"]) {
            self.add("X");
            return cur + 3;
        }
        if self.string_at(cur, &["TH"]) || self.string_at(cur, &["TTH"]) {
            // "thomas", "thames", or Germanic
            if self.string_at(cur + 2, &["OM", "AM"]) || self.string_at(0, &["VAN ", "VON "]) || self.string_at(0, &["SCH"]) {
                self.add("T");
            } else {
                self.add2("0", "T");
            }
            return cur + 2;
        }
        self.add("T");
        if self.string_at(cur + 1, &["T", "D"]) {
            cur + 2
        } else {
            cur + 1
        }
    }

    fn letter_w(&mut self, cur: isize) -> isize {
        if self.string_at(cur, &["WR"]) {
            self.add("R");
            return cur + 2;
        }
        if cur == 0 && (self.is_vowel(cur + 1) || self.string_at(cur, &["WH"])) {
            // "Wasserman" matches "Vasserman"
            if self.is_vowel(cur + 1) {
                self.add2("A", "F");
            } else {
                self.add("A");
            }
        }
        // "Arnow" matches "Arnoff"
        if (cur == self.last && self.is_vowel(cur - 1))
            || self.string_at(cur - 1, &["EWSKI", "EWSKY", "OWSKI", "OWSKY"])
            || self.string_at(0, &["SCH"])
        {
            self.add2("", "F");
            return cur + 1;
        }
        // Polish "filipowicz"
        if self.string_at(cur, &["WICZ", "WITZ"]) {
            self.add2("TS", "FX");
            return cur + 4;
        }
        cur + 1
    }

    fn letter_z(&mut self, cur: isize) -> isize {
        // Chinese pinyin "zhao"
        if self.at(cur + 1) == 'H' {
            self.add("J");
            return cur + 2;
        }
        if self.string_at(cur + 1, &["ZO", "ZI", "ZA"]) || (self.slavo_germanic && cur > 0 && self.at(cur - 1) != 'T') {
            self.add2("S", "TS");
        } else {
            self.add("S");
        }
        if self.at(cur + 1) == 'Z' {
            cur + 2
        } else {
            cur + 1
        }
    }
}

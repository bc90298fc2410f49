//! Porter's suffix-stripping stemmer (the classic 1980 algorithm).
//!
//! Operates on lowercase ASCII words; anything containing other characters
//! is returned unchanged. Words of length <= 2 are never stemmed.

use alloc::string::String;

struct Stem {
    b: [u8; 64],
    len: usize,
}

impl Stem {
    fn ends(&self, suffix: &[u8]) -> bool {
        self.len >= suffix.len() && &self.b[self.len - suffix.len()..self.len] == suffix
    }

    /// True when position `i` holds a consonant.
    ///
    /// Vowels are a,e,i,o,u plus y when it follows a consonant.
    fn cons(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => {
                if i == 0 {
                    true
                } else {
                    !self.cons(i - 1)
                }
            }
            _ => true,
        }
    }

    /// The measure m of the first `j` letters: [C](VC)^m[V].
    fn measure(&self, j: usize) -> usize {
        let mut i = 0;
        while i < j && self.cons(i) {
            i += 1;
        }
        let mut m = 0;
        loop {
            while i < j && !self.cons(i) {
                i += 1;
            }
            if i == j {
                return m;
            }
            m += 1;
            while i < j && self.cons(i) {
                i += 1;
            }
            if i == j {
                return m;
            }
        }
    }

    fn m(&self) -> usize {
        self.measure(self.len)
    }

    /// Stem (first `j` letters) contains a vowel.
    fn has_vowel(&self, j: usize) -> bool {
        (0..j).any(|i| !self.cons(i))
    }

    /// Ends with a double consonant.
    fn double_cons(&self) -> bool {
        self.len >= 2 && self.b[self.len - 1] == self.b[self.len - 2] && self.cons(self.len - 1)
    }

    /// Ends cvc where the final c is not w, x or y.
    fn cvc(&self, j: usize) -> bool {
        if j < 3 || !self.cons(j - 1) || self.cons(j - 2) || !self.cons(j - 3) {
            return false;
        }
        !matches!(self.b[j - 1], b'w' | b'x' | b'y')
    }

    fn truncate(&mut self, n: usize) {
        self.len -= n;
    }

    fn push(&mut self, s: &[u8]) {
        self.b[self.len..self.len + s.len()].copy_from_slice(s);
        self.len += s.len();
    }

    /// Replace `suffix` with `rep` if the remaining stem has measure > `min_m`.
    fn replace_m(&mut self, suffix: &[u8], rep: &[u8], min_m: usize) -> bool {
        if self.ends(suffix) && self.measure(self.len - suffix.len()) > min_m {
            self.truncate(suffix.len());
            self.push(rep);
            true
        } else {
            false
        }
    }

    fn step_1a(&mut self) {
        if self.ends(b"sses") {
            self.truncate(2);
        } else if self.ends(b"ies") {
            self.truncate(2);
        } else if self.ends(b"ss") {
            // unchanged
        } else if self.ends(b"s") {
            self.truncate(1);
        }
    }

    fn step_1b(&mut self) {
        if self.ends(b"eed") {
            if self.measure(self.len - 3) > 0 {
                self.truncate(1);
            }
            return;
        }
        let removed = if self.ends(b"ed") && self.has_vowel(self.len - 2) {
            self.truncate(2);
            true
        } else if self.ends(b"ing") && self.has_vowel(self.len - 3) {
            self.truncate(3);
            true
        } else {
            false
        };
        if !removed {
            return;
        }
        if self.ends(b"at") || self.ends(b"bl") || self.ends(b"iz") {
            self.push(b"e");
        } else if self.double_cons() && !matches!(self.b[self.len - 1], b'l' | b's' | b'z') {
            self.truncate(1);
        } else if self.m() == 1 && self.cvc(self.len) {
            self.push(b"e");
        }
    }

    fn step_1c(&mut self) {
        if self.ends(b"y") && self.has_vowel(self.len - 1) {
            self.b[self.len - 1] = b'i';
        }
    }

    fn step_2(&mut self) {
        const RULES: &[(&[u8], &[u8])] = &[
            (b"ational", b"ate"),
            (b"tional", b"tion"),
            (b"enci", b"ence"),
            (b"anci", b"ance"),
            (b"izer", b"ize"),
            (b"abli", b"able"),
            (b"alli", b"al"),
            (b"entli", b"ent"),
            (b"eli", b"e"),
            (b"ousli", b"ous"),
            (b"ization", b"ize"),
            (b"ation", b"ate"),
            (b"ator", b"ate"),
            (b"alism", b"al"),
            (b"iveness", b"ive"),
            (b"fulness", b"ful"),
            (b"ousness", b"ous"),
            (b"aliti", b"al"),
            (b"iviti", b"ive"),
            (b"biliti", b"ble"),
        ];
        for (suf, rep) in RULES {
            if self.ends(suf) {
                self.replace_m(suf, rep, 0);
                return;
            }
        }
    }

    fn step_3(&mut self) {
        const RULES: &[(&[u8], &[u8])] = &[
            (b"icate", b"ic"),
            (b"ative", b""),
            (b"alize", b"al"),
            (b"iciti", b"ic"),
            (b"ical", b"ic"),
            (b"ful", b""),
            (b"ness", b""),
        ];
        for (suf, rep) in RULES {
            if self.ends(suf) {
                self.replace_m(suf, rep, 0);
                return;
            }
        }
    }

    fn step_4(&mut self) {
        const SUFFIXES: &[&[u8]] = &[
            b"ement", b"ance", b"ence", b"able", b"ible", b"ment", b"ion", b"ism", b"ate", b"iti",
            b"ous", b"ive", b"ize", b"ant", b"ent", b"al", b"er", b"ic", b"ou",
        ];
        for suf in SUFFIXES {
            if self.ends(suf) {
                let j = self.len - suf.len();
                if *suf == b"ion".as_slice() && !(j >= 1 && matches!(self.b[j - 1], b's' | b't')) {
                    return;
                }
                if self.measure(j) > 1 {
                    self.truncate(suf.len());
                }
                return;
            }
        }
    }

    fn step_5a(&mut self) {
        if self.ends(b"e") {
            let m = self.measure(self.len - 1);
            if m > 1 || (m == 1 && !self.cvc(self.len - 1)) {
                self.truncate(1);
            }
        }
    }

    fn step_5b(&mut self) {
        if self.double_cons() && self.b[self.len - 1] == b'l' && self.m() > 1 {
            self.truncate(1);
        }
    }
}

/// Stem a lowercase word. Non-ASCII-alphabetic words pass through untouched.
pub fn stem(word: &str) -> String {
    let bytes = word.as_bytes();
    if bytes.len() <= 2 || bytes.len() > 64 || !bytes.iter().all(|b| b.is_ascii_lowercase()) {
        return String::from(word);
    }
    let mut s = Stem { b: [0; 64], len: bytes.len() };
    s.b[..bytes.len()].copy_from_slice(bytes);
    s.step_1a();
    s.step_1b();
    s.step_1c();
    s.step_2();
    s.step_3();
    s.step_4();
    s.step_5a();
    s.step_5b();
    String::from_utf8_lossy(&s.b[..s.len]).into_owned()
}

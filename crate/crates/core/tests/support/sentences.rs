//! Every sentence the shipped grammar generates, up to a token bound.

use std::collections::{BTreeMap, BTreeSet};

use effparse_core::{Lexicon, Syntax};

type Phrases = BTreeSet<Vec<String>>;

struct Gen {
    words: BTreeMap<String, Phrases>,
    rules: BTreeMap<String, Vec<Vec<String>>>,
    memo: BTreeMap<(String, usize), Phrases>,
}

impl Gen {
    fn phrases(&mut self, cat: &str, max: usize) -> Phrases {
        if max == 0 {
            return Phrases::new();
        }
        if let Some(p) = self.memo.get(&(cat.to_string(), max)) {
            return p.clone();
        }
        let mut out: Phrases = self.words.get(cat).into_iter().flatten().filter(|w| w.len() <= max).cloned().collect();
        for rhs in self.rules.get(cat).cloned().unwrap_or_default() {
            match rhs.as_slice() {
                [child] => out.extend(self.phrases(child, max)),
                [l, r] => {
                    for left in self.phrases(l, max - 1) {
                        for right in self.phrases(r, max - left.len()) {
                            out.insert(left.iter().chain(&right).cloned().collect());
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        self.memo.insert((cat.to_string(), max), out.clone());
        out
    }
}

pub fn grammar_sentences(lex: &Lexicon, syn: &Syntax, max_tokens: usize) -> Vec<String> {
    let mut words: BTreeMap<String, Phrases> = BTreeMap::new();
    for e in &lex.entries {
        if let Some(c) = &e.category {
            words.entry(c.clone()).or_default().insert(e.tokens());
        }
    }
    let mut rules: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
    for ((l, r), parents) in &syn.binary {
        for p in parents {
            rules.entry(p.clone()).or_default().push(vec![l.clone(), r.clone()]);
        }
    }
    for (child, parents) in &syn.unary {
        for p in parents {
            rules.entry(p.clone()).or_default().push(vec![child.clone()]);
        }
    }
    let mut g = Gen { words, rules, memo: BTreeMap::new() };
    g.phrases(&syn.start, max_tokens).into_iter().map(|ws| ws.join(" ")).collect()
}

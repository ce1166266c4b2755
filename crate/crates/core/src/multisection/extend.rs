use serde::Serialize;

use super::Multisection;
use crate::certificate::{bounds, Certificate};
use crate::clopen::Clopen;
use crate::completion::GeneratorTable;
use crate::pmap::PartialMap;
use crate::search::word_ball;

#[derive(Clone, Debug, Serialize)]
pub struct Extension {
    pub subdivision: Vec<Clopen>,
    pub sections: Vec<Multisection>,
}

/// Finds a subdivision of `e_1` and, per piece, a section of degree `d + 1` extending the
/// restriction of `s`. The extra transporter is a restricted table word whose image
/// misses the support of `s`; pieces are split into child cylinders when none exists,
/// down to `max_split` extra levels.
pub fn extend_degree(
    s: &Multisection,
    table: &GeneratorTable,
    max_len: usize,
    max_split: usize,
    budget: u64,
) -> Certificate<Extension> {
    let b = bounds(&[("max_len", max_len as u64), ("max_split", max_split as u64), ("budget", budget)]);
    let ball = word_ball(table.arity(), table.maps(), max_len, budget);
    let mut nodes = ball.nodes;
    let support = s.support();
    let mut out = Extension { subdivision: Vec::new(), sections: Vec::new() };
    let mut todo: Vec<(Clopen, usize)> = vec![(s.base().clone(), 0)];
    while let Some((piece, level)) = todo.pop() {
        let r = s.restrict_msec(&piece).expect("piece below base");
        let found = ball.elems.iter().find_map(|(u, _)| {
            nodes += 1;
            let f = u.restrict(&piece);
            (f.dom() == piece && f.ran().disjoint(&support).unwrap_or(false)).then_some(f)
        });
        match found {
            Some(f) => {
                let mut maps: Vec<PartialMap> = r.transporters()[1..].to_vec();
                maps.push(f);
                out.subdivision.push(piece.clone());
                out.sections.push(Multisection::build(&piece, &maps).expect("disjoint image"));
            }
            None if level < max_split => {
                for child in split(&piece).into_iter().rev() {
                    todo.push((child, level + 1));
                }
            }
            None => {
                let f = serde_json::json!({ "stuck_piece": piece.to_string(), "ball_size": ball.elems.len() });
                return Certificate::exhausted(f, b, nodes);
            }
        }
    }
    Certificate::witness(out, b, nodes)
}

fn split(c: &Clopen) -> Vec<Clopen> {
    c.words()
        .iter()
        .flat_map(|w| (0..c.arity()).map(move |x| Clopen::cylinder(c.arity(), w.child(x))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clopen::Word;

    #[test]
    fn single_piece_when_room_is_available() {
        let s = super::super::tests::three();
        let mut t = GeneratorTable::new(2);
        t.insert("x", PartialMap::from_pairs(2, &[("00", "11"), ("11", "00"), ("01", "01"), ("10", "10")])).unwrap();
        let cert = extend_degree(&s, &t, 2, 2, 10_000);
        let ext = cert.witness.unwrap();
        assert_eq!(ext.sections.len(), 1);
        let n = &ext.sections[0];
        assert_eq!(n.degree(), 4);
        assert!(n.verify());
        assert_eq!(n.idems()[3], Clopen::cylinder(2, Word::from("11")));
    }

    #[test]
    fn empty_table_is_exhausted() {
        let s = super::super::tests::three();
        let cert = extend_degree(&s, &GeneratorTable::new(2), 3, 1, 10_000);
        assert!(!cert.is_witness());
    }
}

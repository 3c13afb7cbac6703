//! PACE `.td` files: `s td <bags> <width+1> <vertices>`, then
//! `b <id> <vertices...>` lines and tree edges, all 1-based.

use std::fmt::Write as _;

use super::TreeDecomposition;

pub fn write_td(td: &TreeDecomposition) -> String {
    let max_bag = td.bags().iter().map(Vec::len).max().unwrap_or(0);
    let mut s = format!("s td {} {} {}\n", td.num_nodes(), max_bag, td.num_vertices());
    for (i, bag) in td.bags().iter().enumerate() {
        let _ = write!(s, "b {}", i + 1);
        for v in bag {
            let _ = write!(s, " {}", v + 1);
        }
        s.push('\n');
    }
    for (a, b) in td.tree_edges() {
        let _ = writeln!(s, "{} {}", a + 1, b + 1);
    }
    s
}

/// Parses a `.td` file; the decomposition is rooted at bag 1.
pub fn read_td(text: &str) -> Result<TreeDecomposition, String> {
    let mut header: Option<(usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |m: &str| format!("line {}: {m}", i + 1);
        let toks: Vec<&str> = line.split_whitespace().collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| err(&format!("bad number `{t}`")));
        match toks.first().copied() {
            None | Some("c") => {}
            Some("s") => {
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(err("bad solution line"));
                }
                let (nb, nv) = (num(toks[2])?, num(toks[4])?);
                header = Some((nb, nv));
                bags = vec![None; nb];
            }
            Some("b") => {
                let (nb, nv) = header.ok_or_else(|| err("bag before header"))?;
                let id = num(toks.get(1).ok_or_else(|| err("missing bag id"))?)?;
                if id == 0 || id > nb {
                    return Err(err("bag id out of range"));
                }
                let mut bag = Vec::new();
                for t in &toks[2..] {
                    let v = num(t)?;
                    if v == 0 || v > nv {
                        return Err(err("vertex out of range"));
                    }
                    bag.push(v - 1);
                }
                bags[id - 1] = Some(bag);
            }
            Some(_) => {
                let (nb, _) = header.ok_or_else(|| err("edge before header"))?;
                if toks.len() != 2 {
                    return Err(err("expected a tree edge"));
                }
                let (a, b) = (num(toks[0])?, num(toks[1])?);
                if a == 0 || b == 0 || a > nb || b > nb {
                    return Err(err("edge endpoint out of range"));
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    let (_, nv) = header.ok_or("missing `s td` line")?;
    let bags: Vec<Vec<usize>> = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or(format!("bag {} missing", i + 1)))
        .collect::<Result<_, _>>()?;
    TreeDecomposition::new(nv, bags, &edges, 0).map_err(|e| e.to_string())
}

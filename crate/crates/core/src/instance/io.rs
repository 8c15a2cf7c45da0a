use super::Instance;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use std::fmt::Write as _;

struct Line<'a> {
    no: usize,
    fields: Vec<&'a str>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn field<T: std::str::FromStr>(line: &Line, idx: usize, what: &str) -> Result<T> {
    let raw = line
        .fields
        .get(idx)
        .ok_or_else(|| parse_err(line.no, format!("missing {what}")))?;
    raw.parse()
        .map_err(|_| parse_err(line.no, format!("bad {what} `{raw}`")))
}

fn cost_field(line: &Line, idx: usize) -> Result<Rational> {
    let raw = line
        .fields
        .get(idx)
        .ok_or_else(|| parse_err(line.no, "missing opening cost"))?;
    rational::parse(raw).ok_or_else(|| parse_err(line.no, format!("bad opening cost `{raw}`")))
}

fn expect_arity(line: &Line, n: usize) -> Result<()> {
    if line.fields.len() != n {
        return Err(parse_err(line.no, format!("expected {n} fields, found {}", line.fields.len())));
    }
    Ok(())
}

/// Parses the text instance format.
///
/// ```text
/// CKFL <n_clients> <n_facilities> <k>
/// C <id> <x> <y>
/// F <id> <x> <y> <capacity> <opening cost>
/// ```
///
/// or, with an explicit metric,
///
/// ```text
/// CKFL-MATRIX <n_clients> <n_facilities> <k>
/// C <id>
/// F <id> <capacity> <opening cost>
/// <one row of n_clients + n_facilities distances per point, clients first>
/// ```
///
/// Blank lines and `#` comments are ignored. Opening costs accept decimals or
/// `p/q` and are kept exact.
pub fn load_instance(text: &str) -> Result<Instance> {
    let mut lines = text.lines().enumerate().filter_map(|(no, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then(|| Line { no: no + 1, fields: body.split_whitespace().collect() })
    });
    let header = lines.next().ok_or_else(|| parse_err(0, "empty input"))?;
    expect_arity(&header, 4)?;
    let matrix = match header.fields[0] {
        "CKFL" => false,
        "CKFL-MATRIX" => true,
        other => return Err(parse_err(header.no, format!("unknown header `{other}`"))),
    };
    let n: usize = field(&header, 1, "client count")?;
    let m: usize = field(&header, 2, "facility count")?;
    let k: usize = field(&header, 3, "k")?;

    let mut clients: Vec<(u64, (f64, f64))> = Vec::with_capacity(n);
    let mut facilities: Vec<(u64, (f64, f64), u64, Rational)> = Vec::with_capacity(m);
    for _ in 0..n + m {
        let line = lines.next().ok_or_else(|| parse_err(0, "unexpected end of input in point list"))?;
        match (line.fields[0], matrix) {
            ("C", false) => {
                expect_arity(&line, 4)?;
                clients.push((field(&line, 1, "id")?, (field(&line, 2, "x")?, field(&line, 3, "y")?)));
            }
            ("C", true) => {
                expect_arity(&line, 2)?;
                clients.push((field(&line, 1, "id")?, (0.0, 0.0)));
            }
            ("F", false) => {
                expect_arity(&line, 6)?;
                facilities.push((
                    field(&line, 1, "id")?,
                    (field(&line, 2, "x")?, field(&line, 3, "y")?),
                    field(&line, 4, "capacity")?,
                    cost_field(&line, 5)?,
                ));
            }
            ("F", true) => {
                expect_arity(&line, 4)?;
                facilities.push((field(&line, 1, "id")?, (0.0, 0.0), field(&line, 2, "capacity")?, cost_field(&line, 3)?));
            }
            (tag, _) => return Err(parse_err(line.no, format!("expected C or F record, found `{tag}`"))),
        }
    }
    if clients.len() != n || facilities.len() != m {
        return Err(Error::Validation(format!(
            "header declares {n} clients and {m} facilities, found {} and {}",
            clients.len(),
            facilities.len()
        )));
    }

    // Internal indices follow ascending id; remember where each file row went.
    let mut c_order: Vec<usize> = (0..n).collect();
    c_order.sort_by_key(|&a| clients[a].0);
    let mut f_order: Vec<usize> = (0..m).collect();
    f_order.sort_by_key(|&a| facilities[a].0);
    let client_ids = c_order.iter().map(|&a| clients[a].0).collect();
    let facility_ids = f_order.iter().map(|&a| facilities[a].0).collect();
    let capacities = f_order.iter().map(|&a| facilities[a].2).collect();
    let costs = f_order.iter().map(|&a| facilities[a].3.clone()).collect();

    if !matrix {
        let coords = c_order
            .iter()
            .map(|&a| clients[a].1)
            .chain(f_order.iter().map(|&a| facilities[a].1))
            .collect();
        let inst = Instance::from_points(client_ids, facility_ids, capacities, costs, k, coords)?;
        if let Some(extra) = lines.next() {
            return Err(parse_err(extra.no, "trailing data"));
        }
        return Ok(inst);
    }

    let p = n + m;
    let mut file_rows = Vec::with_capacity(p);
    for _ in 0..p {
        let line = lines.next().ok_or_else(|| parse_err(0, "unexpected end of input in distance matrix"))?;
        expect_arity(&line, p)?;
        let row: Vec<f64> = (0..p).map(|c| field(&line, c, "distance")).collect::<Result<_>>()?;
        file_rows.push(row);
    }
    if let Some(extra) = lines.next() {
        return Err(parse_err(extra.no, "trailing data"));
    }
    // File point `a` for internal point `q`.
    let file_point: Vec<usize> = c_order.iter().copied().chain(f_order.iter().map(|&a| n + a)).collect();
    let mut dist = vec![0.0; p * p];
    for a in 0..p {
        for b in 0..p {
            dist[a * p + b] = file_rows[file_point[a]][file_point[b]];
        }
    }
    Instance::from_matrix(client_ids, facility_ids, capacities, costs, k, dist)
}

/// Writes `inst` in the format read by [`load_instance`]. Coordinates and
/// distances use the shortest decimal that round-trips exactly.
pub fn save_instance(inst: &Instance) -> String {
    let (n, m) = (inst.n_clients(), inst.n_facilities());
    let mut out = String::new();
    match &inst.coords {
        Some(coords) => {
            let _ = writeln!(out, "CKFL {n} {m} {}", inst.k);
            for j in 0..n {
                let (x, y) = coords[j];
                let _ = writeln!(out, "C {} {x:?} {y:?}", inst.client_ids[j]);
            }
            for i in 0..m {
                let (x, y) = coords[n + i];
                let _ = writeln!(
                    out,
                    "F {} {x:?} {y:?} {} {}",
                    inst.facility_ids[i],
                    inst.capacities[i],
                    rational::format(&inst.opening_costs[i])
                );
            }
        }
        None => {
            let _ = writeln!(out, "CKFL-MATRIX {n} {m} {}", inst.k);
            for j in 0..n {
                let _ = writeln!(out, "C {}", inst.client_ids[j]);
            }
            for i in 0..m {
                let _ = writeln!(
                    out,
                    "F {} {} {}",
                    inst.facility_ids[i],
                    inst.capacities[i],
                    rational::format(&inst.opening_costs[i])
                );
            }
            let p = n + m;
            for a in 0..p {
                let row: Vec<String> = (0..p).map(|b| format!("{:?}", inst.point_dist(a, b))).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_colocated() {
        let inst = load_instance("CKFL 1 1 1\nC 0 0 0\nF 0 0 0 1 0\n").unwrap();
        assert_eq!(inst.d(0, 0), 0.0);
        assert_eq!(inst.k, 1);
    }

    #[test]
    fn k_above_facility_count_is_rejected() {
        let text = "CKFL 1 2 3\nC 0 0 0\nF 0 0 0 1 0\nF 1 1 0 1 0\n";
        assert!(matches!(load_instance(text), Err(Error::Validation(_))));
    }

    #[test]
    fn malformed_field_reports_line() {
        let text = "CKFL 1 1 1\n# comment\nC 0 zero 0\nF 0 0 0 1 0\n";
        assert!(matches!(load_instance(text), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn ids_are_sorted_and_costs_exact() {
        let text = "CKFL 2 2 1\nC 7 0 0\nC 3 1 0\nF 9 0 0 2 1/3\nF 4 1 0 2 0.1\n";
        let inst = load_instance(text).unwrap();
        assert_eq!(inst.client_ids, vec![3, 7]);
        assert_eq!(inst.facility_ids, vec![4, 9]);
        assert_eq!(inst.opening_costs[0], rational::ratio(1, 10));
        assert_eq!(inst.opening_costs[1], rational::ratio(1, 3));
        // Client 3 sits at (1,0), which is where facility 4 is.
        assert_eq!(inst.d(0, 0), 0.0);
    }

    #[test]
    fn matrix_variant_round_trips() {
        let text = "CKFL-MATRIX 1 2 1\nC 0\nF 0 1 0\nF 1 2 2.5\n0 1 2\n1 0 1.5\n2 1.5 0\n";
        let inst = load_instance(text).unwrap();
        assert_eq!(inst.d_ff(0, 1), 1.5);
        let again = load_instance(&save_instance(&inst)).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn matrix_variant_reorders_by_id() {
        let text = "CKFL-MATRIX 1 2 1\nC 0\nF 5 1 0\nF 2 1 0\n0 1 2\n1 0 1.5\n2 1.5 0\n";
        let inst = load_instance(text).unwrap();
        assert_eq!(inst.facility_ids, vec![2, 5]);
        assert_eq!(inst.d(0, 0), 2.0);
        assert_eq!(inst.d(1, 0), 1.0);
    }
}

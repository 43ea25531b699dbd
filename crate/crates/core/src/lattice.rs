//! Subgroups of Z^k in canonical Hermite-normal-form bases.

use std::fmt;

/// A subgroup of Z^k, stored as a row basis in Hermite normal form: pivot
/// columns strictly increase, pivots are positive, entries below a pivot are
/// zero and entries above it are reduced into `[0, pivot)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerLattice {
    ambient: usize,
    basis: Vec<Vec<i64>>,
}

impl IntegerLattice {
    pub fn trivial(ambient: usize) -> IntegerLattice {
        IntegerLattice {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> IntegerLattice {
        let basis = (0..ambient)
            .map(|i| {
                let mut row = vec![0; ambient];
                row[i] = 1;
                row
            })
            .collect();
        IntegerLattice { ambient, basis }
    }

    pub fn from_generators(ambient: usize, gens: &[Vec<i64>]) -> IntegerLattice {
        let mut mat: Vec<Vec<i64>> = gens
            .iter()
            .filter(|g| g.iter().any(|&x| x != 0))
            .cloned()
            .collect();
        for g in &mat {
            assert_eq!(g.len(), ambient);
        }
        let basis = hermite_normal_form(&mut mat, ambient);
        IntegerLattice { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// Whether the lattice is all of Z^k.
    pub fn is_full(&self) -> bool {
        self.rank() == self.ambient && self.basis.iter().enumerate().all(|(i, row)| row[i] == 1)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        assert_eq!(v.len(), self.ambient);
        let mut rem: Vec<i64> = v.to_vec();
        for row in &self.basis {
            let pivot_col = row.iter().position(|&x| x != 0).expect("nonzero row");
            if rem[pivot_col] != 0 {
                if rem[pivot_col] % row[pivot_col] != 0 {
                    return false;
                }
                let q = rem[pivot_col] / row[pivot_col];
                for (r, b) in rem.iter_mut().zip(row) {
                    *r -= q * b;
                }
            }
        }
        rem.iter().all(|&x| x == 0)
    }
}

impl fmt::Display for IntegerLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.basis.is_empty() {
            return write!(f, "0");
        }
        if self.is_full() {
            return match self.ambient {
                1 => write!(f, "Z"),
                k => write!(f, "Z^{k}"),
            };
        }
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|row| {
                if self.ambient == 1 {
                    format!("{}", row[0])
                } else {
                    format!(
                        "({})",
                        row.iter()
                            .map(|x| x.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                }
            })
            .collect();
        write!(f, "<{}>", rows.join(","))
    }
}

/// Row-style HNF by integer elimination; `mat` is consumed.
fn hermite_normal_form(mat: &mut Vec<Vec<i64>>, ambient: usize) -> Vec<Vec<i64>> {
    let mut pivot_row = 0;
    for col in 0..ambient {
        // Reduce everything below pivot_row in this column to a single entry.
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..mat.len() {
                if mat[i][col] != 0 {
                    best = match best {
                        None => Some(i),
                        Some(j) if mat[i][col].abs() < mat[j][col].abs() => Some(i),
                        keep => keep,
                    };
                }
            }
            let Some(b) = best else { break };
            mat.swap(pivot_row, b);
            let mut any_left = false;
            for i in pivot_row + 1..mat.len() {
                if mat[i][col] != 0 {
                    let q = mat[i][col] / mat[pivot_row][col];
                    for c in 0..ambient {
                        mat[i][c] -= q * mat[pivot_row][c];
                    }
                    if mat[i][col] != 0 {
                        any_left = true;
                    }
                }
            }
            if !any_left {
                break;
            }
        }
        if pivot_row < mat.len() && mat[pivot_row][col] != 0 {
            if mat[pivot_row][col] < 0 {
                for c in 0..ambient {
                    mat[pivot_row][c] = -mat[pivot_row][c];
                }
            }
            // Reduce the rows above into [0, pivot).
            let p = mat[pivot_row][col];
            for i in 0..pivot_row {
                let q = mat[i][col].div_euclid(p);
                if q != 0 {
                    for c in 0..ambient {
                        mat[i][c] -= q * mat[pivot_row][c];
                    }
                }
            }
            pivot_row += 1;
        }
    }
    mat.truncate(pivot_row);
    mat.retain(|row| row.iter().any(|&x| x != 0));
    mat.clone()
}

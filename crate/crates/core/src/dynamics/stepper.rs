/// Stepper that only re-examines pairs near the previous step's swaps.
///
/// Pair `j` (cells `j`, `j + 1`) swaps iff `w[j] < w[j+1]`, the right
/// condition `w[j+1] >= w[j+2]` holds and either `w[j-1] >= w[j]` or
/// `w[j-1..=j+1] == 012`. The decision reads cells `j - 1 ..= j + 2`, so a
/// swap at pair `j` can only change the decisions of pairs `j - 2 ..= j + 2`.
/// Work per step is proportional to the number of swaps in the previous
/// step.
#[derive(Debug, Clone)]
pub struct Stepper {
    cells: Vec<u8>,
    candidates: Vec<usize>,
    swaps: Vec<usize>,
    stamp: Vec<u32>,
    generation: u32,
}

#[inline]
fn swaps_at(w: &[u8], j: usize) -> bool {
    let n = w.len();
    if j + 1 >= n {
        return false;
    }
    let (a, b) = (w[j], w[j + 1]);
    if a >= b {
        return false;
    }
    if j + 2 < n && b < w[j + 2] {
        return false;
    }
    j == 0 || w[j - 1] >= a || (w[j - 1] == 0 && a == 1 && b == 2)
}

impl Stepper {
    pub fn new(symbols: &[u8]) -> Self {
        let pairs = symbols.len().saturating_sub(1);
        Self {
            cells: symbols.to_vec(),
            candidates: (0..pairs).collect(),
            swaps: Vec::new(),
            stamp: vec![0; pairs],
            generation: 0,
        }
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<u8> {
        self.cells
    }

    /// Applies one evolution step and returns the number of swapped pairs;
    /// zero means the configuration is a fixed point.
    pub fn step(&mut self) -> usize {
        self.swaps.clear();
        for &j in &self.candidates {
            if swaps_at(&self.cells, j) {
                self.swaps.push(j);
            }
        }
        for &j in &self.swaps {
            self.cells.swap(j, j + 1);
        }

        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        self.candidates.clear();
        let pairs = self.stamp.len();
        for &j in &self.swaps {
            for c in j.saturating_sub(2)..(j + 3).min(pairs) {
                if self.stamp[c] != self.generation {
                    self.stamp[c] = self.generation;
                    self.candidates.push(c);
                }
            }
        }
        self.swaps.len()
    }
}

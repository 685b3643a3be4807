/// Axis-aligned box `[min_corner, max_corner]`, closed on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct Mbr {
    pub min_corner: Vec<f64>,
    pub max_corner: Vec<f64>,
}

impl Mbr {
    pub fn from_point(p: &[f64]) -> Self {
        Self {
            min_corner: p.to_vec(),
            max_corner: p.to_vec(),
        }
    }

    /// Bounding box of `points`; `None` when the iterator is empty.
    pub fn of_points<'a>(mut points: impl Iterator<Item = &'a [f64]>) -> Option<Self> {
        let mut mbr = Self::from_point(points.next()?);
        for p in points {
            mbr.expand_point(p);
        }
        Some(mbr)
    }

    pub fn dim(&self) -> usize {
        self.min_corner.len()
    }

    pub fn expand_point(&mut self, p: &[f64]) {
        for (k, &x) in p.iter().enumerate() {
            if x < self.min_corner[k] {
                self.min_corner[k] = x;
            }
            if x > self.max_corner[k] {
                self.max_corner[k] = x;
            }
        }
    }

    pub fn expand(&mut self, other: &Mbr) {
        for k in 0..self.dim() {
            if other.min_corner[k] < self.min_corner[k] {
                self.min_corner[k] = other.min_corner[k];
            }
            if other.max_corner[k] > self.max_corner[k] {
                self.max_corner[k] = other.max_corner[k];
            }
        }
    }

    pub fn union(&self, other: &Mbr) -> Mbr {
        let mut m = self.clone();
        m.expand(other);
        m
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        p.iter()
            .enumerate()
            .all(|(k, &x)| self.min_corner[k] <= x && x <= self.max_corner[k])
    }

    /// True when `self` lies inside the closed box `[lo, hi]`.
    pub fn inside(&self, lo: &[f64], hi: &[f64]) -> bool {
        (0..self.dim()).all(|k| lo[k] <= self.min_corner[k] && self.max_corner[k] <= hi[k])
    }

    /// True when `self` and the closed box `[lo, hi]` share at least one point.
    pub fn intersects(&self, lo: &[f64], hi: &[f64]) -> bool {
        (0..self.dim()).all(|k| self.min_corner[k] <= hi[k] && lo[k] <= self.max_corner[k])
    }

    pub fn volume(&self) -> f64 {
        self.min_corner
            .iter()
            .zip(&self.max_corner)
            .map(|(a, b)| b - a)
            .product()
    }

    pub fn center(&self, k: usize) -> f64 {
        0.5 * (self.min_corner[k] + self.max_corner[k])
    }
}

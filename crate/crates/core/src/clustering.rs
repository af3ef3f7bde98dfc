use std::fmt;

/// Cluster assignment of a single point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Cluster(usize),
    Noise,
}

impl Label {
    pub fn cluster(self) -> Option<usize> {
        match self {
            Label::Cluster(id) => Some(id),
            Label::Noise => None,
        }
    }

    pub fn is_noise(self) -> bool {
        self == Label::Noise
    }

    /// `-1` for noise, the cluster id otherwise.
    pub fn as_i64(self) -> i64 {
        match self {
            Label::Cluster(id) => id as i64,
            Label::Noise => -1,
        }
    }

    pub fn from_i64(v: i64) -> Option<Self> {
        match v {
            -1 => Some(Label::Noise),
            v if v >= 0 => Some(Label::Cluster(v as usize)),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Cluster(id) => write!(f, "{id}"),
            Label::Noise => f.write_str("noise"),
        }
    }
}

/// A total labeling of a dataset. Cluster ids are `0..centers.len()` and
/// `centers[c]` is a representative point index of cluster `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub labels: Vec<Label>,
    pub centers: Vec<usize>,
}

impl Clustering {
    pub fn num_clusters(&self) -> usize {
        self.centers.len()
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_noise()).count()
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(_, l)| *l == Label::Cluster(cluster))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.centers.len()];
        for l in &self.labels {
            if let Label::Cluster(c) = l {
                sizes[*c] += 1;
            }
        }
        sizes
    }

    /// Points grouped by label, in order of first appearance. Two labelings
    /// describe the same partition iff their groups are equal.
    pub fn partition(&self) -> Vec<Vec<usize>> {
        let mut order: Vec<Label> = Vec::new();
        for l in &self.labels {
            if !order.contains(l) {
                order.push(*l);
            }
        }
        order
            .into_iter()
            .map(|l| {
                self.labels
                    .iter()
                    .enumerate()
                    .filter(|&(_, x)| *x == l)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_integer_encoding() {
        assert_eq!(Label::Noise.as_i64(), -1);
        assert_eq!(Label::from_i64(3), Some(Label::Cluster(3)));
        assert_eq!(Label::from_i64(-1), Some(Label::Noise));
        assert_eq!(Label::from_i64(-2), None);
    }

    #[test]
    fn sizes_and_partition() {
        let c = Clustering {
            labels: vec![Label::Cluster(1), Label::Noise, Label::Cluster(0), Label::Cluster(1)],
            centers: vec![2, 0],
        };
        assert_eq!(c.sizes(), vec![1, 2]);
        assert_eq!(c.noise_count(), 1);
        assert_eq!(c.members(1), vec![0, 3]);
        assert_eq!(c.partition(), vec![vec![0, 3], vec![1], vec![2]]);
    }
}

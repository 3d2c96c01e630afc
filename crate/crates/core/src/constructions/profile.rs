use crate::error::{Error, Result};
use crate::gf::Field;

/// Block structure shared by the linkage and add-on constructions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionProfile {
    pub field: Field,
    pub nbar: Vec<usize>,
    pub k: usize,
    pub d: usize,
    pub abar: Option<Vec<usize>>,
    pub bbar: Option<Vec<usize>>,
}

impl CompositionProfile {
    pub fn new(field: Field, nbar: &[usize], k: usize, d: usize) -> Result<Self> {
        let p = CompositionProfile {
            field,
            nbar: nbar.to_vec(),
            k,
            d,
            abar: None,
            bbar: None,
        };
        p.check_linkage()?;
        Ok(p)
    }

    pub fn with_addon(mut self, abar: &[usize], bbar: &[usize]) -> Result<Self> {
        self.abar = Some(abar.to_vec());
        self.bbar = Some(bbar.to_vec());
        self.check_addon()?;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.nbar.iter().sum()
    }

    pub fn l(&self) -> usize {
        self.nbar.len()
    }

    /// Start coordinate of every block, followed by `n`.
    pub fn sigma(&self) -> Vec<usize> {
        let mut s = vec![0];
        for &ni in &self.nbar {
            s.push(s.last().unwrap() + ni);
        }
        s
    }

    fn check_linkage(&self) -> Result<()> {
        if self.nbar.len() < 2 {
            return Err(Error::pre("a composition needs at least two blocks"));
        }
        if self.d == 0 || !self.d.is_multiple_of(2) || self.d > 2 * self.k {
            return Err(Error::pre(format!(
                "subspace distance {} must be even and at most 2k",
                self.d
            )));
        }
        if let Some(&ni) = self.nbar.iter().find(|&&ni| ni < self.k) {
            return Err(Error::pre(format!(
                "block length {ni} is below k = {}",
                self.k
            )));
        }
        Ok(())
    }

    fn check_addon(&self) -> Result<()> {
        self.check_linkage()?;
        let (Some(a), Some(b)) = (&self.abar, &self.bbar) else {
            return Err(Error::pre("add-on profiles need abar and bbar"));
        };
        let l = self.l();
        if a.len() != l || b.len() != l {
            return Err(Error::pre("abar and bbar must have one entry per block"));
        }
        if a.iter().sum::<usize>() != self.k {
            return Err(Error::pre(format!("sum of abar must be k = {}", self.k)));
        }
        if b.iter().sum::<usize>() != self.k - self.d / 2 {
            return Err(Error::pre(format!(
                "sum of bbar must be k - d/2 = {}",
                self.k - self.d / 2
            )));
        }
        for i in 0..l {
            if a[i] < self.d / 2 || b[i] >= a[i] || a[i] > self.nbar[i] {
                return Err(Error::pre(format!(
                    "block {i}: need d/2 <= a_i, b_i < a_i <= n_i (a_i={}, b_i={}, n_i={})",
                    a[i], b[i], self.nbar[i]
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn abar(&self) -> &[usize] {
        self.abar.as_deref().expect("validated add-on profile")
    }

    pub(crate) fn bbar(&self) -> &[usize] {
        self.bbar.as_deref().expect("validated add-on profile")
    }
}

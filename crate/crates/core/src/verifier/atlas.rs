//! Breadth-first exploration of the labeled exchange graph.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::laurent::LaurentPoly;
use crate::matrix::{c_mutate, g_mutate, IntMatrix};
use crate::seed::{EngineOptions, Fingerprint, Seed};

use super::VerifyError;

/// Default cap on the number of stored seeds.
pub const DEFAULT_MAX_SEEDS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExploreOptions {
    pub depth: usize,
    pub max_seeds: usize,
    /// 1 runs single-threaded; 0 uses the global rayon pool.
    pub workers: usize,
    pub engine: EngineOptions,
}

impl ExploreOptions {
    pub fn with_depth(depth: usize) -> Self {
        Self {
            depth,
            ..Self::default()
        }
    }
}

impl Default for ExploreOptions {
    fn default() -> Self {
        Self {
            depth: 8,
            max_seeds: DEFAULT_MAX_SEEDS,
            workers: 1,
            engine: EngineOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum Closure {
    /// Some layer at or before the bound produced no new seed.
    Closed { depth: usize },
    /// The layer at the depth bound was still nonempty.
    Truncated,
}

/// One stored seed with the data attached to it.
#[derive(Debug, Clone)]
pub struct AtlasEntry {
    seed: Seed,
    fingerprint: Fingerprint,
    path: Vec<usize>,
    c: IntMatrix,
    g: IntMatrix,
    c_recurrence: IntMatrix,
    g_recurrence: IntMatrix,
}

impl AtlasEntry {
    pub fn seed(&self) -> &Seed {
        &self.seed
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    /// Witness mutation path from the origin (directions are 1-based).
    pub fn path(&self) -> &[usize] {
        &self.path
    }

    pub fn depth(&self) -> usize {
        self.path.len()
    }

    /// C-matrix: bottom block of the extended matrix.
    pub fn c(&self) -> &IntMatrix {
        &self.c
    }

    /// G-matrix from the multidegrees of the cluster variables.
    pub fn g(&self) -> &IntMatrix {
        &self.g
    }

    /// C-matrix tracked by the coefficient recurrence along the path.
    pub fn c_recurrence(&self) -> &IntMatrix {
        &self.c_recurrence
    }

    /// G-matrix tracked by the G recurrence along the path.
    pub fn g_recurrence(&self) -> &IntMatrix {
        &self.g_recurrence
    }
}

/// Deliberate corruptions used as negative controls for the checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Canary {
    /// Negate the leading coefficient of a non-initial cluster variable.
    FlipSign,
    /// Break sign-coherence of the first c-vector.
    PerturbC,
}

/// The labeled seeds within `depth` mutations of the principal seed,
/// deduplicated by exact equality.
#[derive(Debug, Clone)]
pub struct ExplorationAtlas {
    origin: IntMatrix,
    options: ExploreOptions,
    entries: Vec<AtlasEntry>,
    index: HashMap<Fingerprint, Vec<usize>>,
    layers: Vec<usize>,
    closure: Closure,
}

struct Child {
    parent: usize,
    k: usize,
    seed: Seed,
    fingerprint: Fingerprint,
    g: IntMatrix,
    c_recurrence: IntMatrix,
    g_recurrence: IntMatrix,
}

impl ExplorationAtlas {
    pub fn origin_matrix(&self) -> &IntMatrix {
        &self.origin
    }

    pub fn options(&self) -> &ExploreOptions {
        &self.options
    }

    pub fn depth_bound(&self) -> usize {
        self.options.depth
    }

    pub fn entries(&self) -> &[AtlasEntry] {
        &self.entries
    }

    pub fn origin(&self) -> &AtlasEntry {
        &self.entries[0]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of new seeds found at each depth, starting with the origin.
    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.closure, Closure::Closed { .. })
    }

    pub fn get(&self, seed: &Seed) -> Option<&AtlasEntry> {
        let fp = seed.fingerprint();
        self.index
            .get(&fp)?
            .iter()
            .map(|&i| &self.entries[i])
            .find(|e| &e.seed == seed)
    }

    /// Distinct cluster variables over all stored seeds.
    pub fn cluster_variables(&self) -> HashSet<&LaurentPoly> {
        self.entries
            .iter()
            .flat_map(|e| e.seed.vars().iter())
            .collect()
    }

    /// Applies a corruption to the deepest stored seed and returns its
    /// witness path, or `None` when no entry qualifies.
    pub fn inject_canary(&mut self, canary: Canary) -> Option<Vec<usize>> {
        match canary {
            Canary::FlipSign => {
                let (idx, var) = self.entries.iter().enumerate().rev().find_map(|(i, e)| {
                    e.seed
                        .vars()
                        .iter()
                        .position(|v| v.len() > 1)
                        .map(|j| (i, j))
                })?;
                let entry = &mut self.entries[idx];
                let old = &entry.seed.vars()[var];
                let (lead, coeff) = old.leading_term()?;
                let flip = LaurentPoly::monomial(lead.clone(), -coeff * 2);
                let corrupted = old + &flip;
                entry.seed = entry.seed.with_variable(var, corrupted);
                Some(entry.path.clone())
            }
            Canary::PerturbC => {
                let entry = self.entries.last_mut()?;
                let n = entry.c.rows();
                let col = entry.c.column(0);
                let r = col.iter().position(|&v| v != 0).unwrap_or(0);
                if n >= 2 {
                    let s = col[r].signum().max(1);
                    entry.c.set((r + 1) % n, 0, -s);
                } else {
                    entry.c.set(0, 0, col[0] + 1);
                }
                Some(entry.path.clone())
            }
        }
    }
}

fn map_workers<T, R, F>(workers: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match workers {
        1 => items.iter().map(f).collect(),
        0 => items.par_iter().map(f).collect(),
        w => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| items.par_iter().map(f).collect()),
            Err(_) => items.iter().map(f).collect(),
        },
    }
}

/// Breadth-first closure of the labeled seeds under `mu_1..mu_n` up to
/// `opts.depth`. Children of a layer are computed (possibly concurrently)
/// and then inserted in order of (parent, direction), so the atlas does not
/// depend on the worker count.
pub fn explore(b0: &IntMatrix, opts: &ExploreOptions) -> Result<ExplorationAtlas, VerifyError> {
    let origin_seed = Seed::principal(b0).map_err(VerifyError::Config)?;
    let n = origin_seed.rank();
    let identity = IntMatrix::identity(n).expect("rank is positive");
    let root = AtlasEntry {
        fingerprint: origin_seed.fingerprint(),
        path: Vec::new(),
        c: origin_seed.c_matrix(),
        g: origin_seed.g_matrix().map_err(VerifyError::Config)?,
        c_recurrence: identity.clone(),
        g_recurrence: identity,
        seed: origin_seed,
    };
    let mut atlas = ExplorationAtlas {
        origin: b0.clone(),
        options: *opts,
        index: HashMap::from([(root.fingerprint, vec![0])]),
        entries: vec![root],
        layers: vec![1],
        closure: Closure::Truncated,
    };
    if opts.max_seeds < 1 {
        return Err(VerifyError::Budget { limit: opts.max_seeds });
    }

    let mut frontier: Vec<usize> = vec![0];
    let mut depth: usize = 0;
    loop {
        if frontier.is_empty() {
            atlas.closure = Closure::Closed {
                depth: depth.saturating_sub(1),
            };
            atlas.layers.pop();
            break;
        }
        if depth == opts.depth {
            break;
        }
        let tasks: Vec<(usize, usize)> = frontier
            .iter()
            .flat_map(|&p| {
                let back = atlas.entries[p].path.last().copied();
                (1..=n).filter(move |&k| Some(k) != back).map(move |k| (p, k))
            })
            .collect();
        let entries = &atlas.entries;
        let children = map_workers(opts.workers, &tasks, |&(parent, k)| {
            expand(b0, &entries[parent], parent, k, &opts.engine)
        });

        let mut next = Vec::new();
        for child in children {
            let child = child?;
            let slot = atlas.index.entry(child.fingerprint).or_default();
            if slot
                .iter()
                .any(|&i| atlas.entries[i].seed == child.seed)
            {
                continue;
            }
            if atlas.entries.len() >= opts.max_seeds {
                return Err(VerifyError::Budget {
                    limit: opts.max_seeds,
                });
            }
            let idx = atlas.entries.len();
            slot.push(idx);
            let mut path = atlas.entries[child.parent].path.clone();
            path.push(child.k);
            atlas.entries.push(AtlasEntry {
                c: child.seed.c_matrix(),
                seed: child.seed,
                fingerprint: child.fingerprint,
                path,
                g: child.g,
                c_recurrence: child.c_recurrence,
                g_recurrence: child.g_recurrence,
            });
            next.push(idx);
        }
        depth += 1;
        atlas.layers.push(next.len());
        frontier = next;
    }
    Ok(atlas)
}

fn expand(
    b0: &IntMatrix,
    parent: &AtlasEntry,
    parent_idx: usize,
    k: usize,
    engine: &EngineOptions,
) -> Result<Child, VerifyError> {
    let mut path = parent.path.clone();
    path.push(k);
    let at = |source| VerifyError::Engine {
        path: path.clone(),
        source,
    };
    let seed = parent.seed.mutate_with(k, engine).map_err(at)?;
    let g = seed.g_matrix().map_err(at)?;
    let bt = parent.seed.exchange_matrix();
    let c_recurrence = c_mutate(&bt, &parent.c_recurrence, k).map_err(|e| at(e.into()))?;
    let g_recurrence = g_mutate(&parent.g_recurrence, &bt, &parent.c_recurrence, b0, k)
        .map_err(|e| at(e.into()))?;
    Ok(Child {
        parent: parent_idx,
        k,
        fingerprint: seed.fingerprint(),
        seed,
        g,
        c_recurrence,
        g_recurrence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn a2_closes_with_ten_seeds() {
        let atlas = explore(&m(&[&[0, 1], &[-1, 0]]), &ExploreOptions::with_depth(12)).unwrap();
        assert!(atlas.is_closed());
        assert_eq!(atlas.len(), 10);
        assert_eq!(atlas.cluster_variables().len(), 5);
        assert_eq!(atlas.layers(), &[1, 2, 2, 2, 2, 1]);
        assert_eq!(atlas.closure(), Closure::Closed { depth: 5 });
    }

    #[test]
    fn rank_one_closes_with_two_seeds() {
        let atlas = explore(&m(&[&[0]]), &ExploreOptions::with_depth(5)).unwrap();
        assert!(atlas.is_closed());
        assert_eq!(atlas.len(), 2);
    }

    #[test]
    fn affine_is_truncated() {
        let atlas = explore(&m(&[&[0, 2], &[-2, 0]]), &ExploreOptions::with_depth(6)).unwrap();
        assert_eq!(atlas.closure(), Closure::Truncated);
        assert_eq!(atlas.len(), 13);
        assert_eq!(atlas.layers().last(), Some(&2));
    }

    #[test]
    fn depth_zero_holds_only_the_origin() {
        let atlas = explore(&m(&[&[0, 1], &[-1, 0]]), &ExploreOptions::with_depth(0)).unwrap();
        assert_eq!(atlas.len(), 1);
        assert_eq!(atlas.closure(), Closure::Truncated);
    }

    #[test]
    fn budget_is_enforced() {
        let opts = ExploreOptions {
            max_seeds: 5,
            ..ExploreOptions::with_depth(12)
        };
        assert!(matches!(
            explore(&m(&[&[0, 1], &[-1, 0]]), &opts),
            Err(VerifyError::Budget { limit: 5 })
        ));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            explore(&m(&[&[0, 1], &[1, 0]]), &ExploreOptions::with_depth(2)),
            Err(VerifyError::Config(_))
        ));
    }
}

//! Minion homomorphisms and their set-valued `(d, r)` relaxation, checked on
//! slices.

use std::collections::BTreeMap;

use super::slice::MinionSlice;
use super::{all_maps, compose_maps, minor, FiniteFunction};
use crate::error::{Error, Result};

/// An arity-preserving map sending each function to a set of at most `d`
/// functions.
pub trait SetValuedMinionMap {
    fn d(&self) -> usize;
    fn r(&self) -> usize;
    fn image(&self, t: &FiniteFunction) -> Result<Vec<FiniteFunction>>;
}

/// `t ↦ {t}`; a minion homomorphism from a minion to itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityMap {
    pub r: usize,
}

impl SetValuedMinionMap for IdentityMap {
    fn d(&self) -> usize {
        1
    }

    fn r(&self) -> usize {
        self.r
    }

    fn image(&self, t: &FiniteFunction) -> Result<Vec<FiniteFunction>> {
        Ok(vec![t.clone()])
    }
}

/// `t ↦` the dictators at the coordinates `t` depends on. Defined on
/// non-constant functions with at most `d` essential coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EssentialCoordinatesMap {
    pub d: usize,
    pub r: usize,
    /// Domain size of the target dictators (their codomain is the same set).
    pub size: usize,
}

impl SetValuedMinionMap for EssentialCoordinatesMap {
    fn d(&self) -> usize {
        self.d
    }

    fn r(&self) -> usize {
        self.r
    }

    fn image(&self, t: &FiniteFunction) -> Result<Vec<FiniteFunction>> {
        let coords = t.essential_coordinates();
        if coords.is_empty() || coords.len() > self.d {
            return Err(Error::structural(format!(
                "{t:?} depends on {} coordinates, outside 1..={}",
                coords.len(),
                self.d
            )));
        }
        coords
            .into_iter()
            .map(|i| FiniteFunction::dictator(t.arity(), self.size, self.size, i))
            .collect()
    }
}

/// An explicit `(d, r)` table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrHomomorphismTable {
    d: usize,
    r: usize,
    entries: BTreeMap<FiniteFunction, Vec<FiniteFunction>>,
}

impl DrHomomorphismTable {
    /// Images are sorted and deduplicated, then checked for size and arity.
    pub fn new(
        d: usize,
        r: usize,
        entries: impl IntoIterator<Item = (FiniteFunction, Vec<FiniteFunction>)>,
    ) -> Result<Self> {
        if d == 0 || r == 0 {
            return Err(Error::structural("d and r must be positive"));
        }
        let mut map = BTreeMap::new();
        let mut sizes: Option<[usize; 4]> = None;
        for (t, mut image) in entries {
            image.sort();
            image.dedup();
            check_image(d, &t, &image)?;
            for g in &image {
                let s = [t.in_size(), t.out_size(), g.in_size(), g.out_size()];
                if *sizes.get_or_insert(s) != s {
                    return Err(Error::structural("table mixes functions over different domains"));
                }
            }
            if map.insert(t.clone(), image).is_some() {
                return Err(Error::structural(format!("{t:?} is listed twice")));
            }
        }
        Ok(DrHomomorphismTable { d, r, entries: map })
    }

    pub fn entries(&self) -> impl Iterator<Item = (&FiniteFunction, &[FiniteFunction])> {
        self.entries.iter().map(|(t, img)| (t, img.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl SetValuedMinionMap for DrHomomorphismTable {
    fn d(&self) -> usize {
        self.d
    }

    fn r(&self) -> usize {
        self.r
    }

    fn image(&self, t: &FiniteFunction) -> Result<Vec<FiniteFunction>> {
        self.entries.get(t).cloned().ok_or_else(|| {
            Error::TableIncomplete(format!("no image for {t:?}; the table must cover arity {}", t.arity()))
        })
    }
}

fn check_image(d: usize, t: &FiniteFunction, image: &[FiniteFunction]) -> Result<()> {
    if image.is_empty() || image.len() > d {
        return Err(Error::structural(format!(
            "image of {t:?} has {} elements, outside 1..={d}",
            image.len()
        )));
    }
    if let Some(g) = image.iter().find(|g| g.arity() != t.arity()) {
        return Err(Error::structural(format!("image {g:?} of {t:?} changes the arity")));
    }
    Ok(())
}

/// Image with the `(d, r)` invariants enforced.
pub(crate) fn checked_image(map: &dyn SetValuedMinionMap, t: &FiniteFunction) -> Result<Vec<FiniteFunction>> {
    let image = map.image(t)?;
    check_image(map.d(), t, &image)?;
    Ok(image)
}

/// `t --pi--> minor`, with `ξ(t)` not mapping to `ξ(minor)` along `pi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomomorphismViolation {
    pub source: FiniteFunction,
    pub pi: Vec<usize>,
    pub target_arity: usize,
}

/// Whether a single-valued map commutes with every minor between the
/// slice's declared arities.
pub fn check_minion_homomorphism(
    map: &dyn SetValuedMinionMap,
    slice: &MinionSlice,
) -> Result<Option<HomomorphismViolation>> {
    let mut images = BTreeMap::new();
    for t in slice.iter() {
        let img = checked_image(map, t)?;
        if img.len() != 1 {
            return Err(Error::structural(format!(
                "{t:?} has {} images; a minion homomorphism has one",
                img.len()
            )));
        }
        images.insert(t.clone(), img.into_iter().next().expect("one image"));
    }
    let arities: Vec<usize> = slice.arities().collect();
    for t in slice.iter() {
        for &y in &arities {
            for pi in all_maps(t.arity(), y) {
                let s = minor(t, &pi, y)?;
                let xi_s = match images.get(&s) {
                    Some(img) => img.clone(),
                    None => single(checked_image(map, &s)?, &s)?,
                };
                if minor(&images[t], &pi, y)? != xi_s {
                    return Ok(Some(HomomorphismViolation {
                        source: t.clone(),
                        pi,
                        target_arity: y,
                    }));
                }
            }
        }
    }
    Ok(None)
}

fn single(img: Vec<FiniteFunction>, t: &FiniteFunction) -> Result<FiniteFunction> {
    if img.len() != 1 {
        return Err(Error::structural(format!("{t:?} has {} images", img.len())));
    }
    Ok(img.into_iter().next().expect("one image"))
}

/// A chain of `r` minors with no pair `i < j` whose images are related by
/// the composed minor map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainViolation {
    pub functions: Vec<FiniteFunction>,
    /// `maps[i]` takes `functions[i]` to `functions[i + 1]`.
    pub maps: Vec<Vec<usize>>,
}

struct Node {
    t: FiniteFunction,
    image: Vec<FiniteFunction>,
    /// Composed maps from every earlier element into this one.
    from: Vec<Vec<usize>>,
}

/// Checks every chain of `r` minors starting in the slice, with all arities
/// declared in the slice.
pub fn check_dr_homomorphism(map: &dyn SetValuedMinionMap, slice: &MinionSlice) -> Result<Option<ChainViolation>> {
    for t in slice.iter() {
        checked_image(map, t)?;
    }
    let arities: Vec<usize> = slice.arities().collect();
    for t in slice.iter() {
        let root = Node {
            t: t.clone(),
            image: checked_image(map, t)?,
            from: Vec::new(),
        };
        let mut chain = vec![root];
        let mut maps = Vec::new();
        if !extend(map, &arities, &mut chain, &mut maps)? {
            return Ok(Some(ChainViolation {
                functions: chain.into_iter().map(|n| n.t).collect(),
                maps,
            }));
        }
    }
    Ok(None)
}

/// False leaves the violating chain in place.
fn extend(
    map: &dyn SetValuedMinionMap,
    arities: &[usize],
    chain: &mut Vec<Node>,
    maps: &mut Vec<Vec<usize>>,
) -> Result<bool> {
    if chain.len() == map.r() + 1 {
        return Ok(false);
    }
    let last = chain.len() - 1;
    for &y in arities {
        for pi in all_maps(chain[last].t.arity(), y) {
            let t = minor(&chain[last].t, &pi, y)?;
            let image = checked_image(map, &t)?;
            let mut from: Vec<Vec<usize>> = chain[last].from.iter().map(|m| compose_maps(m, &pi)).collect();
            from.push(pi.clone());
            let mut agrees = false;
            'pairs: for (k, node) in chain.iter().enumerate() {
                for g in &node.image {
                    let moved = minor(g, &from[k], y)?;
                    if image.contains(&moved) {
                        agrees = true;
                        break 'pairs;
                    }
                }
            }
            chain.push(Node { t, image, from });
            maps.push(pi);
            if !agrees && !extend(map, arities, chain, maps)? {
                return Ok(false);
            }
            chain.pop();
            maps.pop();
        }
    }
    Ok(true)
}

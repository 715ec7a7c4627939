//! Geodesics. Both backends have geodetic Cayley graphs (trees and trees of
//! cliques), so the geodesic between two elements is unique.

use super::{CayleyBall, Element, GroupSpec};

/// Word distance `|g^{-1} h|`.
pub fn distance(group: &GroupSpec, g: &Element, h: &Element) -> usize {
    group.multiply(&group.invert(&g.word), &h.word).len()
}

/// Vertices of the geodesic from `g` to `h`, endpoints included.
pub fn geodesic(group: &GroupSpec, g: &Element, h: &Element) -> Vec<Element> {
    let u = group.multiply(&group.invert(&g.word), &h.word);
    let mut cur = g.word.clone();
    let mut out = Vec::with_capacity(u.len() + 1);
    out.push(Element { word: cur.clone() });
    for &s in &u {
        group.push_gen(&mut cur, s);
        out.push(Element { word: cur.clone() });
    }
    out
}

/// The geodesic between two ball sites, or `None` if it leaves the ball.
pub fn geodesic_in_ball(ball: &CayleyBall, g: usize, h: usize) -> Option<Vec<usize>> {
    let group = ball.group();
    let u = group.multiply(&group.invert(&ball.word(g)), &ball.word(h));
    let mut path = vec![g];
    let mut cur = g;
    for &s in &u {
        cur = ball.neighbor(cur, s as usize)?;
        path.push(cur);
    }
    Some(path)
}

/// Largest distance from a vertex on one side of the geodesic triangle
/// `x, y, z` to the union of the other two sides.
pub fn thin_triangle_defect(group: &GroupSpec, x: &Element, y: &Element, z: &Element) -> usize {
    let sides = [
        geodesic(group, x, y),
        geodesic(group, y, z),
        geodesic(group, z, x),
    ];
    let mut worst = 0;
    for i in 0..3 {
        for v in &sides[i] {
            let d = sides
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .flat_map(|(_, s)| s.iter())
                .map(|w| distance(group, v, w))
                .min()
                .unwrap_or(0);
            worst = worst.max(d);
        }
    }
    worst
}

use super::{automorphism::is_isomorphic, Diagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Flags {
    pub connected: bool,
    pub one_pi: bool,
    pub two_pi: bool,
    /// Exchanging the labels i and j gives an isomorphic diagram. Always
    /// false for closed diagrams.
    pub externally_symmetric: bool,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut x = x;
    while parent[x] != r {
        let next = parent[x];
        parent[x] = r;
        x = next;
    }
    r
}

/// Number of vertex components after deleting the internal edges listed in
/// `skip` (indices into `edges`).
fn vertex_components(n: usize, edges: &[(usize, usize)], skip: &[usize]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut count = n;
    for (k, &(a, b)) in edges.iter().enumerate() {
        if skip.contains(&k) {
            continue;
        }
        let (ra, rb) = (find(&mut parent, a / 4), find(&mut parent, b / 4));
        if ra != rb {
            parent[ra] = rb;
            count -= 1;
        }
    }
    count
}

/// Vertex sets of the connected components, each sorted, ordered by their
/// smallest vertex.
pub(crate) fn components(d: &Diagram) -> Vec<Vec<usize>> {
    let n = d.order();
    let mut parent: Vec<usize> = (0..n).collect();
    for (a, b) in d.internal_edges() {
        let (ra, rb) = (find(&mut parent, a / 4), find(&mut parent, b / 4));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        if index[r] == usize::MAX {
            index[r] = out.len();
            out.push(Vec::new());
        }
        out[index[r]].push(v);
    }
    out
}

/// Connectivity of the vertex multigraph with external legs attached to
/// their host vertices. The bare propagator is connected; the empty closed
/// diagram is not.
pub fn is_connected(d: &Diagram) -> bool {
    if d.externals() == 2 {
        let direct = d.is_external(d.partner(d.ext_id(0)));
        if d.order() == 0 {
            return direct;
        }
        if direct {
            return false;
        }
    }
    d.order() > 0 && vertex_components(d.order(), &d.internal_edges(), &[]) == 1
}

fn cut_free(d: &Diagram, edges: &[(usize, usize)], cut: &[usize]) -> bool {
    vertex_components(d.order(), edges, cut) == 1
}

pub fn classify(d: &Diagram) -> Flags {
    let connected = is_connected(d);
    let edges: Vec<(usize, usize)> = d.internal_edges().into_iter().filter(|&(a, b)| a / 4 != b / 4).collect();
    let one_pi = connected && d.order() > 0 && (0..edges.len()).all(|k| cut_free(d, &edges, &[k]));
    let two_pi = one_pi
        && (0..edges.len()).all(|k| ((k + 1)..edges.len()).all(|l| cut_free(d, &edges, &[k, l])));
    let externally_symmetric = d.externals() == 2 && is_isomorphic(d, &d.swap_externals());
    Flags { connected, one_pi, two_pi, externally_symmetric }
}

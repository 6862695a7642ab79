//! Strongly connected components of a sparse matrix's link graph.
//!
//! Ordering the components so that links only point from later to earlier
//! ones makes the matrix block upper triangular; its spectrum is then the
//! union of the spectra of the diagonal blocks.

use crate::sparse::CscMatrix;

/// Components in an order where every link `j -> i` (a nonzero `S_ij`)
/// satisfies `block_of[i] <= block_of[j]`: sinks come first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockOrder {
    pub blocks: Vec<Vec<usize>>,
    pub block_of: Vec<usize>,
    /// Position of each node inside its block.
    pub local: Vec<usize>,
}

impl BlockOrder {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn largest(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Tarjan's algorithm without recursion. Components are emitted after all
/// components reachable from them, which is exactly the sink-first order.
pub fn strongly_connected_components(s: &CscMatrix) -> BlockOrder {
    const UNSEEN: usize = usize::MAX;
    let n = s.n();
    let cp = s.col_ptr();
    let ri = s.row_indices();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    // (node, next edge offset)
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0;
    let mut blocks: Vec<Vec<usize>> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, cp[root]));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut e)) = call.last_mut() {
            if *e < cp[v + 1] {
                let w = ri[*e] as usize;
                *e += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, cp[w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                blocks.push(comp);
            }
        }
    }

    let mut block_of = vec![0; n];
    let mut local = vec![0; n];
    for (b, comp) in blocks.iter().enumerate() {
        for (k, &j) in comp.iter().enumerate() {
            block_of[j] = b;
            local[j] = k;
        }
    }
    BlockOrder {
        blocks,
        block_of,
        local,
    }
}

/// Dense row-major copy of the diagonal block `b`.
pub(crate) fn diagonal_block(s: &CscMatrix, order: &BlockOrder, b: usize) -> Vec<f64> {
    let nodes = &order.blocks[b];
    let m = nodes.len();
    let mut a = vec![0.0; m * m];
    for (c, &j) in nodes.iter().enumerate() {
        for (i, v) in s.column(j) {
            if order.block_of[i] == b {
                a[order.local[i] * m + c] = v;
            }
        }
    }
    a
}

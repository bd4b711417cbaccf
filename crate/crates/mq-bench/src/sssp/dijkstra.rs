//! Textbook sequential shortest paths; the ground truth every parallel run
//! is compared against.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::graph::Graph;

/// Distance of nodes the search never reached.
pub const UNREACHED: u32 = u32::MAX;

/// Dijkstra with lazy deletion on the standard library heap.
pub fn sequential_dijkstra(g: &Graph, source: u32) -> Vec<u32> {
    assert!((source as usize) < g.num_nodes(), "source out of range");
    let mut dist = vec![UNREACHED; g.num_nodes()];
    let mut heap: BinaryHeap<Reverse<(u32, u32)>> = BinaryHeap::new();
    dist[source as usize] = 0;
    heap.push(Reverse((0, source)));
    while let Some(Reverse((d, node))) = heap.pop() {
        if d > dist[node as usize] {
            continue;
        }
        for (target, weight) in g.neighbors(node) {
            let nd = d.saturating_add(weight);
            if nd < dist[target as usize] && nd != UNREACHED {
                dist[target as usize] = nd;
                heap.push(Reverse((nd, target)));
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node() {
        let g = Graph::from_edges(1, &[]).unwrap();
        assert_eq!(sequential_dijkstra(&g, 0), vec![0]);
    }

    #[test]
    fn disconnected_node_stays_unreached() {
        let g = Graph::from_edges(3, &[(0, 1, 2)]).unwrap();
        assert_eq!(sequential_dijkstra(&g, 0), vec![0, 2, UNREACHED]);
    }

    #[test]
    fn picks_the_cheaper_route() {
        let g = Graph::from_edges(4, &[(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 5), (0, 3, 10)])
            .unwrap();
        assert_eq!(sequential_dijkstra(&g, 0), vec![0, 1, 1, 2]);
    }
}

//! AHU-style canonical codes for rooted trees.

/// Canonical code of the subtree at `root`.
///
/// Each node becomes `( tag children )`. Children codes are sorted unless
/// `keep_order(v)` holds, so two trees receive the same code exactly when
/// they are isomorphic as rooted trees respecting tags and the ordered nodes.
pub fn canonical_code_by<'a, C, T, O>(root: usize, children: C, tag: T, keep_order: O) -> Vec<u8>
where
    C: Fn(usize) -> &'a [usize],
    T: Fn(usize) -> u8,
    O: Fn(usize) -> bool,
{
    // Iterative post-order: (node, next child index).
    let mut codes: Vec<(usize, Vec<u8>)> = Vec::new();
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        let kids = children(v);
        if *next < kids.len() {
            let c = kids[*next];
            *next += 1;
            stack.push((c, 0));
            continue;
        }
        stack.pop();
        let start = codes.len() - kids.len();
        let mut parts: Vec<Vec<u8>> = codes.drain(start..).map(|(_, c)| c).collect();
        if !keep_order(v) {
            parts.sort_unstable();
        }
        let len = 3 + parts.iter().map(Vec::len).sum::<usize>();
        let mut code = Vec::with_capacity(len);
        code.push(b'(');
        code.push(tag(v));
        for p in parts {
            code.extend_from_slice(&p);
        }
        code.push(b')');
        codes.push((v, code));
    }
    codes.pop().map(|(_, c)| c).unwrap_or_default()
}

/// Unordered, untagged canonical code of a tree given by child lists.
pub fn canonical_code(children: &[Vec<usize>], root: usize) -> Vec<u8> {
    canonical_code_by(root, |v| children[v].as_slice(), |_| b'.', |_| false)
}

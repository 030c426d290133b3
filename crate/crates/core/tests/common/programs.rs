//! Random programs in the pure subset: no superassignment, no `assign`, no
//! environments or reference objects, no options or generator state.

pub struct Gen(u64);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(seed)
    }

    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    fn pick<'a>(&mut self, xs: &[&'a str]) -> &'a str {
        xs[self.below(xs.len())]
    }

    fn number(&mut self) -> String {
        format!("{}", self.below(19) as i64 - 6)
    }
}

pub struct Program {
    /// Definitions evaluated before the snapshot.
    pub setup: String,
    /// The call whose evaluation must leave existing bindings alone.
    pub call: String,
}

fn numeric_expr(g: &mut Gen, depth: usize) -> String {
    let leaf = match g.below(8) {
        0 => g.number(),
        1 => format!("x[{}]", 1 + g.below(3)),
        2 => "sum(x)".to_string(),
        3 => "l$a".to_string(),
        4 => "length(l$b)".to_string(),
        5 => format!("g0[{}]", 1 + g.below(3)),
        6 => "adder(t)".to_string(),
        _ => "t".to_string(),
    };
    if depth == 0 || g.below(3) == 0 {
        return leaf;
    }
    let op = g.pick(&["+", "-", "*"]);
    format!("({leaf} {op} {})", numeric_expr(g, depth - 1))
}

fn statement(g: &mut Gen, earlier: usize, depth: usize) -> String {
    let e = numeric_expr(g, 2);
    match g.below(if depth == 0 { 5 } else { 8 }) {
        0 => format!("t <- {e}"),
        1 => format!("x[{}] <- {e}", 1 + g.below(3)),
        2 => format!("l$a <- {e}"),
        3 => format!("l$b <- c(l$b, {e})"),
        4 if earlier > 0 => format!("x <- f{}(x, l)", g.below(earlier)),
        4 => "l <- list(a = t, b = x)".to_string(),
        5 => format!(
            "if ({} > {}) {{\n    {}\n  }} else {{\n    {}\n  }}",
            numeric_expr(g, 1),
            g.number(),
            statement(g, earlier, depth - 1),
            statement(g, earlier, depth - 1)
        ),
        6 => format!(
            "i{depth} <- 0\n  while (i{depth} < {}) {{\n    {}\n    i{depth} <- i{depth} + 1\n  }}",
            1 + g.below(3),
            statement(g, earlier, depth - 1)
        ),
        _ => format!("h <- function(z) {{ z[1] <- {e}; x[2] <- z[1]; sum(z) + x[2] }}\n  t <- h(x)"),
    }
}

fn function(g: &mut Gen, index: usize) -> String {
    let mut body = vec!["t <- 0".to_string()];
    for _ in 0..1 + g.below(5) {
        body.push(statement(g, index, 2));
    }
    body.push("x[1] <- t".to_string());
    body.push("x".to_string());
    format!("f{index} <- function(x, l) {{\n  {}\n}}\n", body.join("\n  "))
}

fn vector(g: &mut Gen) -> String {
    let items: Vec<String> = (0..1 + g.below(4)).map(|_| g.number()).collect();
    format!("c({})", items.join(", "))
}

pub fn program(seed: u64) -> Program {
    let g = &mut Gen::new(seed);
    let mut setup = String::new();
    setup.push_str(&format!("g0 <- {}\n", vector(g)));
    setup.push_str(&format!("g1 <- list(a = {}, b = {})\n", g.number(), vector(g)));
    setup.push_str(&format!("mk <- function(s) function(v) v + s\nadder <- mk({})\n", g.number()));
    let count = 1 + g.below(4);
    for i in 0..count {
        setup.push_str(&function(g, i));
    }
    let x = if g.below(2) == 0 { "g0".to_string() } else { vector(g) };
    let l = if g.below(2) == 0 { "g1".to_string() } else { format!("list(a = {}, b = g0)", g.number()) };
    let call = format!("f{}({x}, {l})", g.below(count));
    Program { setup, call }
}

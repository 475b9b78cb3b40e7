//! Square domains cut along the branch line and fan-triangulated.

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub a: Point,
    pub b: Point,
    pub c: Point,
    /// Vertex `a` is an integrable singularity of the integrand.
    pub singular_a: bool,
}

impl Triangle {
    pub fn area(&self) -> f64 {
        0.5 * ((self.b[0] - self.a[0]) * (self.c[1] - self.a[1]) - (self.c[0] - self.a[0]) * (self.b[1] - self.a[1])).abs()
    }

    pub fn diameter(&self) -> f64 {
        dist(self.a, self.b).max(dist(self.b, self.c)).max(dist(self.c, self.a))
    }

    /// Four children. A regular triangle splits into congruent quarters; a
    /// singular one halves both the radius and the opening angle
    /// at `a`, since the pulled-back integrand there varies only with angle.
    pub fn split(&self) -> [Triangle; 4] {
        let ab = mid(self.a, self.b);
        let bc = mid(self.b, self.c);
        let ca = mid(self.c, self.a);
        if self.singular_a {
            let m = mid(ab, ca);
            return [
                Triangle { a: self.a, b: ab, c: m, singular_a: true },
                Triangle { a: self.a, b: m, c: ca, singular_a: true },
                Triangle { a: ab, b: self.b, c: self.c, singular_a: false },
                Triangle { a: ab, b: self.c, c: ca, singular_a: false },
            ];
        }
        [
            Triangle { a: self.a, b: ab, c: ca, singular_a: false },
            Triangle { a: ab, b: self.b, c: bc, singular_a: false },
            Triangle { a: ca, b: bc, c: self.c, singular_a: false },
            Triangle { a: ab, b: bc, c: ca, singular_a: false },
        ]
    }
}

fn mid(p: Point, q: Point) -> Point {
    [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
}

fn dist(p: Point, q: Point) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

/// Line `n·x = c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub n: [f64; 2],
    pub c: f64,
}

impl Line {
    fn eval(&self, p: Point) -> f64 {
        self.n[0] * p[0] + self.n[1] * p[1] - self.c
    }
}

pub fn square(center: Point, half_width: f64) -> Vec<Point> {
    let [x, y] = center;
    let h = half_width;
    vec![[x - h, y - h], [x + h, y - h], [x + h, y + h], [x - h, y + h]]
}

/// Sutherland–Hodgman clip of a convex polygon to `side·(n·x − c) ≥ 0`.
pub fn clip(poly: &[Point], line: &Line, side: f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let fp = side * line.eval(p);
        let fq = side * line.eval(q);
        if fp >= 0.0 {
            out.push(p);
        }
        if (fp > 0.0 && fq < 0.0) || (fp < 0.0 && fq > 0.0) {
            let t = fp / (fp - fq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out.dedup_by(|a, b| dist(*a, *b) == 0.0);
    if out.len() > 1 && dist(out[0], out[out.len() - 1]) == 0.0 {
        out.pop();
    }
    out
}

/// Inserts `pt` into the polygon edge it lies on (within `tol`).
pub fn insert_on_boundary(poly: &mut Vec<Point>, pt: Point, tol: f64) -> bool {
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        if dist(p, pt) <= tol || dist(q, pt) <= tol {
            return true;
        }
        let len = dist(p, q);
        if len == 0.0 {
            continue;
        }
        let cross = ((q[0] - p[0]) * (pt[1] - p[1]) - (q[1] - p[1]) * (pt[0] - p[0])) / len;
        let t = ((pt[0] - p[0]) * (q[0] - p[0]) + (pt[1] - p[1]) * (q[1] - p[1])) / (len * len);
        if cross.abs() <= tol && t > 0.0 && t < 1.0 {
            poly.insert(i + 1, pt);
            return true;
        }
    }
    false
}

/// Fan triangulation of a convex polygon about its vertex centroid. Vertices
/// listed in `singular` become vertex `a` of every triangle touching them.
pub fn fan(poly: &[Point], singular: &[Point], tol: f64) -> Vec<Triangle> {
    let n = poly.len();
    if n < 3 {
        return Vec::new();
    }
    let c = [
        poly.iter().map(|p| p[0]).sum::<f64>() / n as f64,
        poly.iter().map(|p| p[1]).sum::<f64>() / n as f64,
    ];
    let is_sing = |p: Point| singular.iter().any(|s| dist(*s, p) <= tol);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let tris = match (is_sing(p), is_sing(q)) {
            (true, true) => {
                let m = mid(p, q);
                vec![Triangle { a: p, b: m, c, singular_a: true }, Triangle { a: q, b: c, c: m, singular_a: true }]
            }
            (true, false) => vec![Triangle { a: p, b: q, c, singular_a: true }],
            (false, true) => vec![Triangle { a: q, b: c, c: p, singular_a: true }],
            (false, false) => vec![Triangle { a: c, b: p, c: q, singular_a: false }],
        };
        out.extend(tris.into_iter().filter(|t| t.area() > 0.0));
    }
    out
}

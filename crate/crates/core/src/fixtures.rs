//! Bundled measures with analytically known means and collapses.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::cone_space::{ConeSpace, Point};
use crate::frechet::{Atom, Measure};
use crate::gallery::{self, GallerySpec};
use crate::metric_graph::{EdgeId, GraphPoint, MetricGraph, VertexId};

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: &'static str,
    pub spec: GallerySpec,
    pub space: ConeSpace,
    pub measure: Measure,
}

fn fixture(name: &'static str, spec: GallerySpec, atoms: Vec<(Point, f64)>) -> Fixture {
    let space = gallery::build(&spec).expect("bundled spaces are valid");
    let measure = Measure::new(atoms.into_iter().map(|(p, w)| Atom::new(p, w)).collect())
        .expect("bundled measures are valid");
    Fixture {
        name,
        spec,
        space,
        measure,
    }
}

fn vx(u: Vec<f64>, v: usize, r: f64) -> Point {
    Point::new(u, GraphPoint::Vertex(VertexId(v)), r)
}

/// Two unit atoms on two legs of a three-legged spider.
pub fn tripod() -> Fixture {
    fixture(
        "tripod",
        GallerySpec::Spider { legs: 3 },
        vec![(vx(vec![], 0, 1.0), 0.5), (vx(vec![], 1, 1.0), 0.5)],
    )
}

/// Two atoms on different pages of a three-page book, offset along the spine.
pub fn open_book_pair() -> Fixture {
    fixture(
        "open_book_pair",
        GallerySpec::OpenBook { pages: 3, spine_dim: 1 },
        vec![(vx(vec![-1.0], 0, 1.0), 0.5), (vx(vec![1.0], 1, 1.0), 0.5)],
    )
}

/// One atom per page of a three-page book; the mean sticks to the spine.
pub fn sticky_book() -> Fixture {
    let w = 1.0 / 3.0;
    fixture(
        "sticky_book",
        GallerySpec::OpenBook { pages: 3, spine_dim: 1 },
        vec![
            (vx(vec![-1.0], 0, 1.0), w),
            (vx(vec![1.0], 1, 1.0), w),
            (vx(vec![0.0], 2, 1.0), w),
        ],
    )
}

/// Three equally spaced unit atoms on a kale of circumference 7.
pub fn kale_symmetric() -> Fixture {
    let spec = GallerySpec::Kale { circumference: 7.0 };
    let space = gallery::build(&spec).expect("valid kale");
    let atoms = (0..3)
        .map(|i| (Point::new(vec![], gallery::kale_point(&space, 7.0 * i as f64 / 3.0), 1.0), 1.0 / 3.0))
        .collect();
    fixture("kale_symmetric", spec, atoms)
}

/// Theta graph with edges of length 3π/2; the mean is the apex, the
/// fluctuating cone is aimed at vertex `a`, and the first limit log opens a
/// page direction that the second one resolves.
pub fn theta_two_stage() -> Fixture {
    let spec = GallerySpec::Theta {
        edge_length: gallery::THETA_WIDE,
    };
    let space = gallery::build(&spec).expect("valid theta");
    let link = space.link();
    let on = |e: usize, t: f64| Point::new(vec![], link.edge_point(EdgeId(e), t), 1.0);
    let atoms = vec![
        (vx(vec![], 0, 1.0), 0.3),
        (on(0, FRAC_PI_2), 0.2),
        (on(1, FRAC_PI_2), 0.1),
        (on(2, FRAC_PI_2), 0.1),
        (on(1, PI), 0.15),
        (on(2, PI), 0.15),
    ];
    fixture("theta_two_stage", spec, atoms)
}

/// Theta graph with edges of length π (an open book in disguise), with a
/// sticky measure aimed at vertex `a`.
pub fn theta_pi() -> Fixture {
    let spec = GallerySpec::Theta { edge_length: PI };
    let space = gallery::build(&spec).expect("valid theta");
    let link = space.link();
    let mid = |e: usize| Point::new(vec![], link.edge_point(EdgeId(e), FRAC_PI_2), 1.0);
    let atoms = vec![
        (vx(vec![], 0, 1.0), 0.25),
        (vx(vec![], 1, 1.0), 0.25),
        (mid(0), 0.5 / 3.0),
        (mid(1), 0.5 / 3.0),
        (mid(2), 0.5 / 3.0),
    ];
    fixture("theta_pi", spec, atoms)
}

pub fn euclidean_plane() -> Fixture {
    fixture(
        "euclidean_plane",
        GallerySpec::Euclidean { dim: 2 },
        vec![
            (Point::spine(vec![1.0, 0.0]), 0.25),
            (Point::spine(vec![-1.0, 2.0]), 0.25),
            (Point::spine(vec![0.5, -1.0]), 0.5),
        ],
    )
}

/// Mean inside a ray of the spider, away from the apex.
pub fn spider_ray_mean() -> Fixture {
    fixture(
        "spider_ray_mean",
        GallerySpec::Spider { legs: 3 },
        vec![
            (vx(vec![], 0, 2.0), 0.5),
            (vx(vec![], 1, 1.0), 0.25),
            (vx(vec![], 2, 1.0), 0.25),
        ],
    )
}

/// Mean inside a page of a book with a two-dimensional spine.
pub fn book_page_mean() -> Fixture {
    fixture(
        "book_page_mean",
        GallerySpec::OpenBook { pages: 3, spine_dim: 2 },
        vec![
            (vx(vec![0.0, 1.0], 0, 2.0), 0.5),
            (vx(vec![1.0, 0.0], 1, 1.0), 0.25),
            (vx(vec![-1.0, -1.0], 2, 1.0), 0.25),
        ],
    )
}

/// Mean inside a flat sector.
pub fn sector_interior() -> Fixture {
    let spec = GallerySpec::Sector { angle: 2.0 };
    let space = gallery::build(&spec).expect("valid sector");
    let link = space.link();
    let atoms = vec![
        (Point::new(vec![], link.edge_point(EdgeId(0), 0.0), 1.0), 0.5),
        (Point::new(vec![], link.edge_point(EdgeId(0), 2.0), 1.5), 0.5),
    ];
    fixture("sector_interior", spec, atoms)
}

/// The kale fixture times a line, with the atoms spread along the spine.
/// Its hull is only available through the sampled closure.
pub fn kale_cylinder() -> Fixture {
    let kale = gallery::kale(7.0).expect("valid kale");
    let spec = GallerySpec::ConeOver {
        spine_dim: 1,
        link: kale.link().clone(),
    };
    let atoms = (0..3)
        .map(|i| {
            let g = gallery::kale_point(&kale, 7.0 * i as f64 / 3.0);
            (Point::new(vec![i as f64 - 1.0], g, 1.0), 1.0 / 3.0)
        })
        .collect();
    fixture("kale_cylinder", spec, atoms)
}

/// All fixtures used by the property suites.
pub fn all() -> Vec<Fixture> {
    vec![
        tripod(),
        open_book_pair(),
        sticky_book(),
        kale_symmetric(),
        theta_two_stage(),
        theta_pi(),
        euclidean_plane(),
        spider_ray_mean(),
        book_page_mean(),
        sector_interior(),
        kale_cylinder(),
    ]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}

/// A two-cycle of length 4 with two short pendants at `v0`; the mean lies
/// on ray `v0` and the atom at `v1` is reached by two shortest paths. The
/// cycle is shorter than 2π, so the space is built without validation.
pub fn ambiguous_log() -> Fixture {
    let h = FRAC_PI_2;
    let link = MetricGraph::from_edges(4, &[(0, 1, 2.0), (0, 1, 2.0), (0, 2, h), (0, 3, h)])
        .expect("valid graph");
    let space = ConeSpace::unchecked(0, link.clone());
    let measure = Measure::new(vec![
        Atom::new(vx(vec![], 0, 3.0), 0.4),
        Atom::new(vx(vec![], 1, 1.0), 0.2),
        Atom::new(vx(vec![], 2, 1.0), 0.2),
        Atom::new(vx(vec![], 3, 1.0), 0.2),
    ])
    .expect("valid measure");
    Fixture {
        name: "ambiguous_log",
        spec: GallerySpec::ConeOver { spine_dim: 0, link },
        space,
        measure,
    }
}

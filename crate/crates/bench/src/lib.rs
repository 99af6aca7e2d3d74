//! Fixtures shared by the benchmarks.

use warphopf::ambient::radial_from_warp;
use warphopf::{
    build_surface, make_dss, ImmersionGrid, RadialConformalFactor, SurfaceSpec, WarpingModel,
};

/// Schwarzschild-type ambient in isotropic gauge with a surface at `h = 3`.
pub struct Fixture {
    pub model: WarpingModel,
    pub ambient: RadialConformalFactor,
    pub t0: f64,
}

impl Fixture {
    pub fn dss() -> Self {
        let model = make_dss(2.0, 0.0).expect("valid parameters");
        let ambient = radial_from_warp(&model, 0.5).expect("valid anchor");
        let t0 = model.t_for_h(3.0).expect("h = 3 is attained");
        Fixture { model, ambient, t0 }
    }

    pub fn off_center_sphere(&self, n: usize) -> ImmersionGrid {
        let spec = SurfaceSpec::EuclideanSphere {
            center: [0.3, 0.0, 0.2],
            radius: 1.5,
        };
        build_surface(&spec, &self.ambient, n).expect("sphere stays in the annulus")
    }

    pub fn perturbed_slice(&self, n: usize) -> ImmersionGrid {
        let spec = SurfaceSpec::PerturbedSlice {
            t0: self.t0,
            eps: 0.05,
            l: 2,
            m: 1,
        };
        build_surface(&spec, &self.ambient, n).expect("graph stays in the annulus")
    }
}

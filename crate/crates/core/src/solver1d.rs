//! One-dimensional LWFR solver.

use rayon::prelude::*;

use crate::admissibility::{
    fictitious_updates, interior_fluxes, limit_interface_flux, limit_source, scaling_limiter,
    weighted_mean, FaceSide,
};
use crate::basis::ElementOperators;
use crate::equations::{ConservationLaw, Direction, State};
use crate::error::{Location, Result, SolverError};
use crate::fr::{
    extrapolate_states, fr_flux_derivative, interface_wave_speed, lw_numerical_flux, rusanov_flux,
};
use crate::mesh::{Mesh1D, NodalField};
use crate::predictor::{predict_time_averages, PredictorInput, PredictorWorkspace, TimeAverages};
use crate::scheme::{cfl_number, SchemeConfig, StepStats};
use crate::tvb::tvb_limit_1d;

const X: Direction = Direction::X1;

struct ElementData<const NV: usize> {
    avg: TimeAverages<NV>,
    /// `u^n` at `xi = 0, 1`
    u_trace: [State<NV>; 2],
    /// time-averaged flux at `xi = 0, 1`
    f_trace: [State<NV>; 2],
    /// first-order fluxes between consecutive solution points
    interior: Vec<State<NV>>,
}

pub struct Solver1D<L, const NV: usize> {
    pub law: L,
    pub ops: ElementOperators,
    pub mesh: Mesh1D,
    pub config: SchemeConfig,
    coords: Vec<[f64; 2]>,
}

impl<L: ConservationLaw<NV>, const NV: usize> Solver1D<L, NV> {
    pub fn new(law: L, degree: usize, mesh: Mesh1D, config: SchemeConfig) -> Result<Self> {
        let ops = ElementOperators::new(degree)?;
        let coords = (0..mesh.n_cells())
            .flat_map(|e| {
                let mesh = &mesh;
                ops.nodes.iter().map(move |xi| [mesh.node_x(e, *xi), 0.0])
            })
            .collect();
        Ok(Self {
            law,
            ops,
            mesh,
            config,
            coords,
        })
    }

    pub fn degree(&self) -> usize {
        self.ops.degree
    }

    /// Physical position of every solution point, element-major.
    pub fn node_positions(&self) -> impl Iterator<Item = f64> + '_ {
        self.coords.iter().map(|c| c[0])
    }

    /// Sample `init` at the solution points.
    pub fn project(&self, init: impl Fn(f64) -> State<NV>) -> NodalField<NV> {
        let mut field = NodalField::new(self.mesh.n_cells(), self.ops.n_nodes());
        for (u, c) in field.values.iter_mut().zip(&self.coords) {
            *u = init(c[0]);
        }
        field
    }

    /// Mean of every element.
    pub fn cell_averages(&self, field: &NodalField<NV>) -> Vec<State<NV>> {
        (0..field.n_elements())
            .map(|e| weighted_mean(field.element(e), &self.ops.weights))
            .collect()
    }

    /// `sum_e dx_e mean_e`
    pub fn total(&self, field: &NodalField<NV>) -> State<NV> {
        let mut tot = [0.0; NV];
        for (e, m) in self.cell_averages(field).iter().enumerate() {
            for i in 0..NV {
                tot[i] += self.mesh.dx(e) * m[i];
            }
        }
        tot
    }

    fn flux_split_parts(&self) -> f64 {
        if self.config.admissibility.strict_cfl && self.law.has_source() {
            2.0
        } else {
            1.0
        }
    }

    /// Time step from the CFL condition at the current state.
    pub fn stable_dt(&self, field: &NodalField<NV>) -> Result<f64> {
        let mut lam: f64 = 0.0;
        for (idx, u) in field.values.iter().enumerate() {
            let l = self
                .law
                .max_wave_speed(u, X)
                .map_err(|e| e.in_element(idx / field.nodes_per_element))?;
            lam = lam.max(l);
        }
        let mut dt = self.config.cfl_safety * cfl_number(self.degree()) * self.mesh.min_dx() / lam;
        if self.config.admissibility.strict_cfl && self.law.has_source() {
            dt *= 0.5;
        }
        Ok(dt)
    }

    fn element_data(
        &self,
        field: &NodalField<NV>,
        dt: f64,
        need_interior: bool,
    ) -> Result<Vec<ElementData<NV>>> {
        let n = self.ops.n_nodes();
        let t = field.time;
        (0..field.n_elements())
            .into_par_iter()
            .map_init(
                || PredictorWorkspace::new(n, self.degree()),
                |ws, e| {
                    let u = field.element(e);
                    let mut avg = TimeAverages::new(n, 1, self.law.has_source());
                    let input = PredictorInput {
                        dt,
                        dx: [self.mesh.dx(e), 1.0],
                        coords: &self.coords[e * n..(e + 1) * n],
                        time: t,
                    };
                    predict_time_averages(&self.law, &self.ops, 1, u, &input, ws, &mut avg);
                    let (ul, ur) = extrapolate_states(&self.ops, |p| u[p]);
                    let (fl, fr) = extrapolate_states(&self.ops, |p| avg.flux[0][p]);
                    let interior = if need_interior {
                        interior_fluxes(&self.law, u, X).map_err(|err| err.in_element(e))?
                    } else {
                        Vec::new()
                    };
                    Ok(ElementData {
                        avg,
                        u_trace: [ul, ur],
                        f_trace: [fl, fr],
                        interior,
                    })
                },
            )
            .collect()
    }

    /// Advance `field` by one LWFR step of size `dt`, including all enabled
    /// limiters.
    pub fn step(&self, field: &mut NodalField<NV>, dt: f64) -> Result<StepStats> {
        let cfg = &self.config;
        let ops = &self.ops;
        let n = ops.n_nodes();
        let degree = self.degree();
        let topo = self.mesh.topology();
        let limit_faces = cfg.flux_limiter && degree >= 1 && !self.law.constraints().is_empty();
        let data = self.element_data(field, dt, limit_faces || (cfg.verify && degree >= 1))?;
        let dt_flux = dt * self.flux_split_parts();

        let faces: Vec<(State<NV>, f64, bool)> = (0..topo.face_count())
            .into_par_iter()
            .map(|f| {
                let (l, r) = topo.face_cells(f);
                let left = match l {
                    Some(l) => (
                        data[l].u_trace[1],
                        data[l].f_trace[1],
                        field.element(l)[n - 1],
                    ),
                    None => {
                        let r = r.expect("face without cells");
                        (data[r].u_trace[0], data[r].f_trace[0], field.element(r)[0])
                    }
                };
                let right = match r {
                    Some(r) => (data[r].u_trace[0], data[r].f_trace[0], field.element(r)[0]),
                    None => {
                        let l = l.expect("face without cells");
                        (
                            data[l].u_trace[1],
                            data[l].f_trace[1],
                            field.element(l)[n - 1],
                        )
                    }
                };
                let lam =
                    interface_wave_speed(&self.law, X, [&left.0, &right.0], [&left.2, &right.2])
                        .map_err(|e| e.in_element(l.or(r).unwrap_or(0)))?;
                let high = lw_numerical_flux(&left.1, &right.1, &left.0, &right.0, lam);
                if !limit_faces {
                    return Ok((high, 1.0, false));
                }
                let low = rusanov_flux(&self.law, &left.2, &right.2, X)?;
                let mut sides = Vec::with_capacity(2);
                if let Some(l) = l {
                    sides.push(FaceSide::left_of_face(
                        left.2,
                        data[l].interior[n - 2],
                        dt_flux,
                        ops.weights[n - 1],
                        self.mesh.dx(l),
                    ));
                }
                if let Some(r) = r {
                    sides.push(FaceSide::right_of_face(
                        right.2,
                        data[r].interior[0],
                        dt_flux,
                        ops.weights[0],
                        self.mesh.dx(r),
                    ));
                }
                let out = limit_interface_flux(&self.law, &high, &low, &sides, &cfg.admissibility);
                Ok((out.flux, out.theta, out.low_order_inadmissible))
            })
            .collect::<Result<_>>()?;

        let mut stats = StepStats::default();
        for (_, theta, fallback) in &faces {
            if *theta < 1.0 {
                stats.faces_limited += 1;
                stats.min_theta = stats.min_theta.min(*theta);
            }
            if *fallback {
                stats.low_order_fallbacks += 1;
            }
        }

        let limit_src = cfg.source_limiter && self.law.has_source();
        let updates: Vec<(Vec<State<NV>>, StepStats)> = data
            .into_par_iter()
            .enumerate()
            .map(|(e, mut d)| {
                let u = field.element(e);
                let dx = self.mesh.dx(e);
                let (fl, fr) = topo.cell_faces(e);
                let (num_l, num_r) = (faces[fl].0, faces[fr].0);
                let mut st = StepStats::default();
                let mean = weighted_mean(u, &ops.weights);
                if limit_src {
                    let theta = limit_source(
                        &self.law,
                        &mut d.avg.source,
                        &d.avg.source_now,
                        &ops.weights,
                        &mean,
                        2.0 * dt,
                        &cfg.admissibility,
                    )
                    .map_err(|err| err.in_element(e))?;
                    if let Some(t) = theta {
                        st.elements_source_limited = 1;
                        st.min_source_theta = t;
                    }
                }
                let mut new = u.to_vec();
                let has_source = !d.avg.source.is_empty();
                fr_flux_derivative(
                    ops,
                    |p| d.avg.flux[0][p],
                    &d.f_trace[0],
                    &d.f_trace[1],
                    &num_l,
                    &num_r,
                    |p, dfdxi| {
                        for i in 0..NV {
                            new[p][i] -= dt / dx * dfdxi[i];
                            if has_source {
                                new[p][i] += dt * d.avg.source[p][i];
                            }
                        }
                    },
                );
                if cfg.verify {
                    let new_mean = weighted_mean(&new, &ops.weights);
                    let s_bar = if has_source {
                        weighted_mean(&d.avg.source, &ops.weights)
                    } else {
                        [0.0; NV]
                    };
                    let flux_part: State<NV> =
                        std::array::from_fn(|i| mean[i] - dt / dx * (num_r[i] - num_l[i]));
                    for i in 0..NV {
                        let expect = flux_part[i] + dt * s_bar[i];
                        st.average_residual = st.average_residual.max((new_mean[i] - expect).abs());
                    }
                    if degree >= 1 {
                        let check = fictitious_updates(
                            u,
                            &ops.weights,
                            &d.interior,
                            &num_l,
                            &num_r,
                            dt,
                            dx,
                        );
                        let sum = weighted_mean(&check, &ops.weights);
                        for i in 0..NV {
                            st.decomposition_residual =
                                st.decomposition_residual.max((sum[i] - flux_part[i]).abs());
                        }
                    }
                }
                Ok((new, st))
            })
            .collect::<Result<_>>()?;

        for (e, (new, st)) in updates.into_iter().enumerate() {
            field.element_mut(e).copy_from_slice(&new);
            stats.merge(&st);
        }
        field.time += dt;
        self.postprocess(field, &mut stats)?;
        Ok(stats)
    }

    /// TVB limiting, scaling limiter and the final admissibility checks.
    pub fn postprocess(&self, field: &mut NodalField<NV>, stats: &mut StepStats) -> Result<()> {
        let cfg = &self.config;
        if let Some(tvb) = &cfg.tvb {
            let dx: Vec<f64> = (0..self.mesh.n_cells()).map(|e| self.mesh.dx(e)).collect();
            stats.tvb_limited += tvb_limit_1d(&self.ops, field, self.mesh.topology(), &dx, tvb);
        }
        let n = field.nodes_per_element;
        if cfg.scaling_limiter {
            let counts: Vec<usize> = field
                .values
                .par_chunks_mut(n)
                .enumerate()
                .map(|(e, nodes)| {
                    scaling_limiter(&self.law, nodes, &self.ops.weights, &cfg.admissibility)
                        .map_err(|err| err.in_element(e))
                })
                .collect::<Result<_>>()?;
            stats.nodes_scaled += counts.iter().sum::<usize>();
        }
        check_field(&self.law, field)
    }
}

/// Every solution point finite and admissible.
pub(crate) fn check_field<L, const NV: usize>(law: &L, field: &NodalField<NV>) -> Result<()>
where
    L: ConservationLaw<NV> + ?Sized,
{
    let n = field.nodes_per_element;
    for (idx, u) in field.values.iter().enumerate() {
        let location = Location {
            element: Some(idx / n),
            node: Some(idx % n),
            ..Default::default()
        };
        if let Some((constraint, value)) = law.violated_constraint(u) {
            return Err(SolverError::Admissibility {
                constraint,
                value,
                stage: "nodal",
                location,
            });
        }
        if !u.iter().all(|v| v.is_finite()) {
            return Err(SolverError::NonFinite {
                stage: "nodal",
                location,
            });
        }
    }
    Ok(())
}

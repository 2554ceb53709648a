//! Two-dimensional LWFR solver on Cartesian grids.
//!
//! Elements carry `(N+1)^2` Gauss-Legendre points in tensor order
//! `p + (N+1) q` (`p` along `x`). Interface fluxes are computed per
//! solution-point row or column, so each face holds `N+1` flux values.
//!
//! The admissibility argument splits the update into an `x` and a `y`
//! fictitious sweep, each with twice the time step (three times when the
//! source takes its own share).

use rayon::prelude::*;

use crate::admissibility::{
    fictitious_updates, interior_fluxes, limit_interface_flux, limit_source, scaling_limiter,
    weighted_mean, FaceSide,
};
use crate::basis::ElementOperators;
use crate::equations::{ConservationLaw, Direction, State};
use crate::error::Result;
use crate::fr::{
    extrapolate_states, fr_flux_derivative, interface_wave_speed, lw_numerical_flux, rusanov_flux,
};
use crate::mesh::{Grid2D, NodalField};
use crate::predictor::{predict_time_averages, PredictorInput, PredictorWorkspace, TimeAverages};
use crate::scheme::{cfl_number, SchemeConfig, StepStats};
use crate::solver1d::check_field;
use crate::tvb::tvb_limit_2d;

/// Traces of one element along one axis, indexed by the transverse node.
struct AxisTraces<const NV: usize> {
    u_lo: Vec<State<NV>>,
    u_hi: Vec<State<NV>>,
    f_lo: Vec<State<NV>>,
    f_hi: Vec<State<NV>>,
    /// First-order fluxes along each line.
    interior: Vec<Vec<State<NV>>>,
}

struct ElementData<const NV: usize> {
    avg: TimeAverages<NV>,
    axes: [AxisTraces<NV>; 2],
}

/// Node index of point `k` along `axis` on transverse line `line`.
#[inline]
fn line_index(n: usize, axis: usize, line: usize, k: usize) -> usize {
    if axis == 0 {
        k + n * line
    } else {
        line + n * k
    }
}

type FaceFluxes<const NV: usize> = Vec<(State<NV>, f64, bool)>;

pub struct Solver2D<L, const NV: usize> {
    pub law: L,
    pub ops: ElementOperators,
    pub grid: Grid2D,
    pub config: SchemeConfig,
    weights: Vec<f64>,
    coords: Vec<[f64; 2]>,
}

impl<L: ConservationLaw<NV>, const NV: usize> Solver2D<L, NV> {
    pub fn new(law: L, degree: usize, grid: Grid2D, config: SchemeConfig) -> Result<Self> {
        let ops = ElementOperators::new(degree)?;
        let n = ops.n_nodes();
        let weights = (0..n * n)
            .map(|k| ops.weights[k % n] * ops.weights[k / n])
            .collect();
        let mut coords = Vec::with_capacity(grid.n_cells() * n * n);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                for k in 0..n * n {
                    coords.push(grid.node_position(i, j, ops.nodes[k % n], ops.nodes[k / n]));
                }
            }
        }
        Ok(Self {
            law,
            ops,
            grid,
            config,
            weights,
            coords,
        })
    }

    pub fn degree(&self) -> usize {
        self.ops.degree
    }

    /// Tensor-product quadrature weights of the reference square.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node_positions(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn project(&self, init: impl Fn([f64; 2]) -> State<NV>) -> NodalField<NV> {
        let n = self.ops.n_nodes();
        let mut field = NodalField::new(self.grid.n_cells(), n * n);
        for (u, c) in field.values.iter_mut().zip(&self.coords) {
            *u = init(*c);
        }
        field
    }

    pub fn cell_averages(&self, field: &NodalField<NV>) -> Vec<State<NV>> {
        (0..field.n_elements())
            .map(|e| weighted_mean(field.element(e), &self.weights))
            .collect()
    }

    pub fn total(&self, field: &NodalField<NV>) -> State<NV> {
        let area = self.grid.dx() * self.grid.dy();
        let mut tot = [0.0; NV];
        for m in self.cell_averages(field) {
            for i in 0..NV {
                tot[i] += area * m[i];
            }
        }
        tot
    }

    fn strict_source(&self) -> bool {
        self.config.admissibility.strict_cfl && self.law.has_source()
    }

    pub fn stable_dt(&self, field: &NodalField<NV>) -> Result<f64> {
        let (dx, dy) = (self.grid.dx(), self.grid.dy());
        let mut rate: f64 = 0.0;
        for (idx, u) in field.values.iter().enumerate() {
            let e = idx / field.nodes_per_element;
            let lx = self
                .law
                .max_wave_speed(u, Direction::X1)
                .map_err(|err| err.in_element(e))?;
            let ly = self
                .law
                .max_wave_speed(u, Direction::X2)
                .map_err(|err| err.in_element(e))?;
            rate = rate.max(lx / dx + ly / dy);
        }
        let mut dt = self.config.cfl_safety * cfl_number(self.degree()) / rate;
        if self.strict_source() {
            dt *= 2.0 / 3.0;
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
        let nn = n * n;
        let t = field.time;
        let h = [self.grid.dx(), self.grid.dy()];
        (0..field.n_elements())
            .into_par_iter()
            .map_init(
                || PredictorWorkspace::new(nn, self.degree()),
                |ws, e| {
                    let u = field.element(e);
                    let mut avg = TimeAverages::new(nn, 2, self.law.has_source());
                    let input = PredictorInput {
                        dt,
                        dx: h,
                        coords: &self.coords[e * nn..(e + 1) * nn],
                        time: t,
                    };
                    predict_time_averages(&self.law, &self.ops, 2, u, &input, ws, &mut avg);
                    let axis_traces = |axis: usize| -> Result<AxisTraces<NV>> {
                        let mut tr = AxisTraces {
                            u_lo: Vec::with_capacity(n),
                            u_hi: Vec::with_capacity(n),
                            f_lo: Vec::with_capacity(n),
                            f_hi: Vec::with_capacity(n),
                            interior: Vec::with_capacity(if need_interior { n } else { 0 }),
                        };
                        for line in 0..n {
                            let idx = |k| line_index(n, axis, line, k);
                            let (ul, ur) = extrapolate_states(&self.ops, |k| u[idx(k)]);
                            let (fl, fr) =
                                extrapolate_states(&self.ops, |k| avg.flux[axis][idx(k)]);
                            tr.u_lo.push(ul);
                            tr.u_hi.push(ur);
                            tr.f_lo.push(fl);
                            tr.f_hi.push(fr);
                            if need_interior {
                                let nodes: Vec<State<NV>> = (0..n).map(|k| u[idx(k)]).collect();
                                tr.interior.push(
                                    interior_fluxes(&self.law, &nodes, Direction::from_axis(axis))
                                        .map_err(|err| err.in_element(e))?,
                                );
                            }
                        }
                        Ok(tr)
                    };
                    let axes = [axis_traces(0)?, axis_traces(1)?];
                    Ok(ElementData { avg, axes })
                },
            )
            .collect()
    }

    fn element_index(&self, axis: usize, cell: usize, row: usize) -> usize {
        if axis == 0 {
            cell + self.grid.nx * row
        } else {
            row + self.grid.nx * cell
        }
    }

    /// Interface fluxes on every face normal to `axis`, stored as
    /// `[row][face][line]` flattened.
    fn face_fluxes(
        &self,
        axis: usize,
        field: &NodalField<NV>,
        data: &[ElementData<NV>],
        limit: bool,
        dt_flux: f64,
    ) -> Result<FaceFluxes<NV>> {
        let n = self.ops.n_nodes();
        let topo = self.grid.topology(axis);
        let rows = if axis == 0 {
            self.grid.ny
        } else {
            self.grid.nx
        };
        let nf = topo.face_count();
        let h = if axis == 0 {
            self.grid.dx()
        } else {
            self.grid.dy()
        };
        let dir = Direction::from_axis(axis);
        let ops = &self.ops;
        let out: Vec<FaceFluxes<NV>> = (0..rows * nf)
            .into_par_iter()
            .map(|rf| {
                let (row, f) = (rf / nf, rf % nf);
                let (l, r) = topo.face_cells(f);
                let el = l.map(|c| self.element_index(axis, c, row));
                let er = r.map(|c| self.element_index(axis, c, row));
                let mut fluxes = Vec::with_capacity(n);
                for line in 0..n {
                    let hi_side = |e: usize| {
                        let tr = &data[e].axes[axis];
                        (
                            tr.u_hi[line],
                            tr.f_hi[line],
                            field.element(e)[line_index(n, axis, line, n - 1)],
                        )
                    };
                    let lo_side = |e: usize| {
                        let tr = &data[e].axes[axis];
                        (
                            tr.u_lo[line],
                            tr.f_lo[line],
                            field.element(e)[line_index(n, axis, line, 0)],
                        )
                    };
                    let left = el.map_or_else(|| lo_side(er.unwrap()), hi_side);
                    let right = er.map_or_else(|| hi_side(el.unwrap()), lo_side);
                    let lam = interface_wave_speed(
                        &self.law,
                        dir,
                        [&left.0, &right.0],
                        [&left.2, &right.2],
                    )
                    .map_err(|err| err.in_element(el.or(er).unwrap_or(0)))?;
                    let high = lw_numerical_flux(&left.1, &right.1, &left.0, &right.0, lam);
                    if !limit {
                        fluxes.push((high, 1.0, false));
                        continue;
                    }
                    let low = rusanov_flux(&self.law, &left.2, &right.2, dir)?;
                    let mut sides = Vec::with_capacity(2);
                    if let Some(e) = el {
                        sides.push(FaceSide::left_of_face(
                            left.2,
                            data[e].axes[axis].interior[line][n - 2],
                            dt_flux,
                            ops.weights[n - 1],
                            h,
                        ));
                    }
                    if let Some(e) = er {
                        sides.push(FaceSide::right_of_face(
                            right.2,
                            data[e].axes[axis].interior[line][0],
                            dt_flux,
                            ops.weights[0],
                            h,
                        ));
                    }
                    let o = limit_interface_flux(
                        &self.law,
                        &high,
                        &low,
                        &sides,
                        &self.config.admissibility,
                    );
                    fluxes.push((o.flux, o.theta, o.low_order_inadmissible));
                }
                Ok(fluxes)
            })
            .collect::<Result<_>>()?;
        Ok(out.into_iter().flatten().collect())
    }

    /// Faces (low, high) of element `(i, j)` normal to `axis`, as offsets into
    /// the flattened face flux array.
    fn face_offsets(&self, axis: usize, i: usize, j: usize) -> (usize, usize) {
        let n = self.ops.n_nodes();
        let topo = self.grid.topology(axis);
        let nf = topo.face_count();
        let (cell, row) = if axis == 0 { (i, j) } else { (j, i) };
        let (fl, fr) = topo.cell_faces(cell);
        ((row * nf + fl) * n, (row * nf + fr) * n)
    }

    pub fn step(&self, field: &mut NodalField<NV>, dt: f64) -> Result<StepStats> {
        let cfg = &self.config;
        let ops = &self.ops;
        let n = ops.n_nodes();
        let degree = self.degree();
        let limit_faces = cfg.flux_limiter && degree >= 1 && !self.law.constraints().is_empty();
        let data = self.element_data(field, dt, limit_faces || (cfg.verify && degree >= 1))?;
        let dt_flux = dt * if self.strict_source() { 3.0 } else { 2.0 };
        let faces = [
            self.face_fluxes(0, field, &data, limit_faces, dt_flux)?,
            self.face_fluxes(1, field, &data, limit_faces, dt_flux)?,
        ];

        let mut stats = StepStats::default();
        for (_, theta, fallback) in faces.iter().flatten() {
            if *theta < 1.0 {
                stats.faces_limited += 1;
                stats.min_theta = stats.min_theta.min(*theta);
            }
            if *fallback {
                stats.low_order_fallbacks += 1;
            }
        }

        let h = [self.grid.dx(), self.grid.dy()];
        let limit_src = cfg.source_limiter && self.law.has_source();
        let updates: Vec<(Vec<State<NV>>, StepStats)> = data
            .into_par_iter()
            .enumerate()
            .map(|(e, mut d)| {
                let (i, j) = (e % self.grid.nx, e / self.grid.nx);
                let u = field.element(e);
                let mut st = StepStats::default();
                let mean = weighted_mean(u, &self.weights);
                if limit_src {
                    let theta = limit_source(
                        &self.law,
                        &mut d.avg.source,
                        &d.avg.source_now,
                        &self.weights,
                        &mean,
                        3.0 * dt,
                        &cfg.admissibility,
                    )
                    .map_err(|err| err.in_element(e))?;
                    if let Some(t) = theta {
                        st.elements_source_limited = 1;
                        st.min_source_theta = t;
                    }
                }
                let has_source = !d.avg.source.is_empty();
                let mut new = u.to_vec();
                if has_source {
                    for (v, s) in new.iter_mut().zip(&d.avg.source) {
                        for c in 0..NV {
                            v[c] += dt * s[c];
                        }
                    }
                }
                let mut flux_part = mean;
                for axis in 0..2 {
                    let (lo, hi) = self.face_offsets(axis, i, j);
                    let tr = &d.axes[axis];
                    let ratio = dt / h[axis];
                    for line in 0..n {
                        let (num_l, num_r) = (faces[axis][lo + line].0, faces[axis][hi + line].0);
                        let idx = |k| line_index(n, axis, line, k);
                        fr_flux_derivative(
                            ops,
                            |k| d.avg.flux[axis][idx(k)],
                            &tr.f_lo[line],
                            &tr.f_hi[line],
                            &num_l,
                            &num_r,
                            |k, dfdxi| {
                                let v = &mut new[idx(k)];
                                for c in 0..NV {
                                    v[c] -= ratio * dfdxi[c];
                                }
                            },
                        );
                        for c in 0..NV {
                            flux_part[c] -= ratio * ops.weights[line] * (num_r[c] - num_l[c]);
                        }
                    }
                }
                if cfg.verify {
                    let new_mean = weighted_mean(&new, &self.weights);
                    let s_bar = if has_source {
                        weighted_mean(&d.avg.source, &self.weights)
                    } else {
                        [0.0; NV]
                    };
                    for c in 0..NV {
                        let expect = flux_part[c] + dt * s_bar[c];
                        st.average_residual = st.average_residual.max((new_mean[c] - expect).abs());
                    }
                    if degree >= 1 {
                        // mean of (x sweep + y sweep) / 2, each with 2 dt
                        let mut sum = [0.0; NV];
                        for axis in 0..2 {
                            let (lo, hi) = self.face_offsets(axis, i, j);
                            for line in 0..n {
                                let nodes: Vec<State<NV>> =
                                    (0..n).map(|k| u[line_index(n, axis, line, k)]).collect();
                                let check = fictitious_updates(
                                    &nodes,
                                    &ops.weights,
                                    &d.axes[axis].interior[line],
                                    &faces[axis][lo + line].0,
                                    &faces[axis][hi + line].0,
                                    2.0 * dt,
                                    h[axis],
                                );
                                let m = weighted_mean(&check, &ops.weights);
                                for c in 0..NV {
                                    sum[c] += 0.5 * ops.weights[line] * m[c];
                                }
                            }
                        }
                        for c in 0..NV {
                            st.decomposition_residual =
                                st.decomposition_residual.max((sum[c] - flux_part[c]).abs());
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

    pub fn postprocess(&self, field: &mut NodalField<NV>, stats: &mut StepStats) -> Result<()> {
        let cfg = &self.config;
        if let Some(tvb) = &cfg.tvb {
            stats.tvb_limited += tvb_limit_2d(&self.ops, field, &self.grid, tvb);
        }
        if cfg.scaling_limiter {
            let n = field.nodes_per_element;
            let counts: Vec<usize> = field
                .values
                .par_chunks_mut(n)
                .enumerate()
                .map(|(e, nodes)| {
                    scaling_limiter(&self.law, nodes, &self.weights, &cfg.admissibility)
                        .map_err(|err| err.in_element(e))
                })
                .collect::<Result<_>>()?;
            stats.nodes_scaled += counts.iter().sum::<usize>();
        }
        check_field(&self.law, field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{primitive_to_conserved, LinearAdvection, TenMoment};
    use crate::mesh::{BoundaryCondition, Mesh1D};
    use crate::solver1d::Solver1D;

    fn grid(nx: usize, ny: usize, bc: BoundaryCondition) -> Grid2D {
        Grid2D::new(nx, ny, [0.0, 0.0], [1.0, 1.0], [bc, bc]).unwrap()
    }

    #[test]
    fn constant_state_is_a_fixed_point() {
        let solver = Solver2D::new(
            TenMoment::new(),
            2,
            grid(5, 4, BoundaryCondition::Outflow),
            SchemeConfig::default(),
        )
        .unwrap();
        let state = primitive_to_conserved(&[0.9, 0.3, -0.2, 1.1, 0.2, 0.8]);
        let mut field = solver.project(|_| state);
        for _ in 0..3 {
            let dt = solver.stable_dt(&field).unwrap();
            solver.step(&mut field, dt).unwrap();
        }
        for u in &field.values {
            for c in 0..6 {
                assert!((u[c] - state[c]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn x_only_data_matches_the_1d_solver() {
        let (l, r) = (
            primitive_to_conserved(&[1.0, 0.1, 0.0, 2.0, 0.05, 0.6]),
            primitive_to_conserved(&[0.125, 0.0, 0.0, 0.2, 0.1, 0.2]),
        );
        let init = |x: f64| if x < 0.5 { l } else { r };
        // the fictitious sweeps use different time steps in 1-D and 2-D
        let config = SchemeConfig {
            flux_limiter: false,
            ..SchemeConfig::default()
        };
        let s1 = Solver1D::new(
            TenMoment::new(),
            2,
            Mesh1D::uniform(0.0, 1.0, 20, BoundaryCondition::Outflow).unwrap(),
            config,
        )
        .unwrap();
        let s2 = Solver2D::new(
            TenMoment::new(),
            2,
            Grid2D::new(
                20,
                3,
                [0.0, 0.0],
                [1.0, 1.0],
                [BoundaryCondition::Outflow, BoundaryCondition::Periodic],
            )
            .unwrap(),
            config,
        )
        .unwrap();
        let mut f1 = s1.project(init);
        let mut f2 = s2.project(|x| init(x[0]));
        let dt = 0.5 * s1.stable_dt(&f1).unwrap().min(s2.stable_dt(&f2).unwrap());
        for _ in 0..10 {
            s1.step(&mut f1, dt).unwrap();
            s2.step(&mut f2, dt).unwrap();
        }
        let n = 3;
        for j in 0..3 {
            for i in 0..20 {
                for q in 0..n {
                    for p in 0..n {
                        let a = f1.element(i)[p];
                        let b = f2.element(i + 20 * j)[p + n * q];
                        for c in 0..6 {
                            assert!((a[c] - b[c]).abs() < 1e-12, "{i} {j} {p} {q} {c}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_advection_conserves_and_verifies() {
        let config = SchemeConfig {
            verify: true,
            ..SchemeConfig::unlimited()
        };
        let solver = Solver2D::new(
            LinearAdvection::new([1.0, -0.5]),
            3,
            grid(6, 6, BoundaryCondition::Periodic),
            config,
        )
        .unwrap();
        let mut field = solver.project(|x| [(6.0 * x[0]).sin() * (4.0 * x[1]).cos() + 2.0]);
        let before = solver.total(&field);
        for _ in 0..20 {
            let dt = solver.stable_dt(&field).unwrap();
            let st = solver.step(&mut field, dt).unwrap();
            assert!(st.average_residual < 1e-13);
            assert!(st.decomposition_residual < 1e-13);
        }
        assert!((solver.total(&field)[0] - before[0]).abs() < 1e-13);
    }
}

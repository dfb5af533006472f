//! Everything computed at one chart point: coordinate jets are differentiated
//! exactly, then contracted into the adapted frame.

use crate::error::{GeomError, Result};
use crate::forms::KForm;
use crate::frame::{build_adapted_frame, check_structure, real_type_part, standard_j, transform_tensor, Frame};
use crate::gauduchon::{compatibility_residuals, connection_jets, CurvatureFamily};
use crate::hermitian::{
    fundamental_form, lambda_contract, lower_vector_valued, nabla_j, nijenhuis, Decomposition, NormBundle,
};
use crate::jet::Jet;
use crate::manifold::{Fields, Manifold};
use crate::riemannian::{
    christoffel, curvature, curvature_operator, j_ricci, j_ricci_form, ricci, scalar_s, weyl, weyl_contract,
    Coefficients, MetricJets, RiemannTensor,
};

/// Jet order the pipeline needs for `h` and `J`.
pub const FIELD_ORDER: u8 = 2;

#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub n: usize,
    pub x: Vec<f64>,
    pub h: Vec<f64>,
    pub sqrt_det: f64,
    pub frame: Frame,
    pub riemann: RiemannTensor,
    pub ricci: Vec<f64>,
    pub s: f64,
    pub ricci_j: Vec<f64>,
    pub s_j: f64,
    pub rho_j: KForm<f64>,
    pub curvature_operator_f: KForm<f64>,
    pub weyl_f: f64,
    /// `F` from the coordinate fields, in the frame.
    pub f: KForm<f64>,
    /// `(∇_A F)_{BC}`
    pub nabla_f: Vec<f64>,
    /// `N_{ABC} = ⟨e_A, N(e_B,e_C)⟩`
    pub nijenhuis: Vec<f64>,
    pub decomposition: Decomposition,
    pub norms: NormBundle,
    /// Lee form by contracting `dF` with `F`.
    pub lee_contraction: KForm<f64>,
    /// The same form in coordinates.
    pub lee_coordinates: KForm<f64>,
    /// Lee form as `JδF`.
    pub lee_codifferential: KForm<f64>,
    pub delta_f: KForm<f64>,
    pub d_delta_f: KForm<f64>,
    pub a0: Coefficients,
    pub a1: Coefficients,
    pub curvature_t: CurvatureFamily,
    /// `T_{ABC}` of the Chern member.
    pub torsion: Vec<f64>,
    /// `⟨e_A, (D⁰−D¹)_{e_B} e_C⟩`
    pub gamma: Vec<f64>,
    /// `F^n/n!` divided by the coordinate volume form.
    pub volume_ratio: f64,
    /// `√−1∂∂̄F` from `−½ P₀ d(L dF)`; exact when `J` is integrable.
    pub ddbar_f: KForm<f64>,
    /// `√−1∂F∧∂̄F` from `−½ a∧La` with `a = (dF)⁺`.
    pub del_f_wedge_delbar_f: KForm<f64>,
    fields: Fields,
}

impl PointGeometry {
    pub fn compute(m: &Manifold, x: &[f64]) -> Result<Self> {
        let fields = m.fields(x, FIELD_ORDER)?;
        Self::from_fields(m.n, x, fields)
    }

    pub fn from_fields(n: usize, x: &[f64], fields: Fields) -> Result<Self> {
        let d = 2 * n;
        if fields.h.len() != d * d || fields.j.len() != d * d {
            return Err(GeomError::Structure(format!("fields must be {d}x{d} matrices")));
        }
        for v in fields.h.iter().chain(&fields.j) {
            if !v.is_constant() && v.order() < FIELD_ORDER {
                return Err(GeomError::Order { needed: FIELD_ORDER, have: v.order() });
            }
        }
        let (hj, jj) = (&fields.h, &fields.j);
        let h: Vec<f64> = hj.iter().map(Jet::value).collect();
        let jv: Vec<f64> = jj.iter().map(Jet::value).collect();
        check_structure(&h, &jv, d)?;
        let frame = build_adapted_frame(&h, &jv, d)?;
        let fv = &frame.vectors;
        let metric = MetricJets::new(hj.clone(), d)?;
        let sqrt_det = metric.sqrt_det.value();

        // Riemannian part
        let gamma_jets = christoffel(&metric)?;
        let gamma_c = Coefficients::from_jets(&gamma_jets, d);
        let riemann = RiemannTensor { n, comps: transform_tensor(&curvature(&gamma_c, &h), 4, d, fv) };
        let ric = ricci(&riemann);
        let s = scalar_s(&ric, d);
        let jf = standard_j(n);
        let ricci_j = j_ricci(&riemann, &jf);
        let s_j = scalar_s(&ricci_j, d);
        let rho_j = j_ricci_form(&ricci_j, &jf, d);

        // forms
        let f_coord = fundamental_form(hj, jj, d);
        let f = f_coord.value().pullback(fv);
        let curvature_operator_f = curvature_operator(&riemann, &f);
        let w = weyl(&riemann, &ric, s);
        let weyl_f = weyl_contract(&w, &f)?;
        let df_coord = f_coord.exterior_derivative()?;
        let df = df_coord.value().pullback(fv);
        let lee_jets = lambda_contract(&df_coord, &f_coord, &metric.hinv);
        let lee_coordinates = lee_jets.value();
        let lee_contraction = lee_coordinates.pullback(fv);
        let delta_lee = lee_jets.codifferential(&metric.hinv, &metric.sqrt_det)?.comps()[0].value();
        let delta_f_jets = f_coord.codifferential(&metric.hinv, &metric.sqrt_det)?;
        let lee2 = KForm::from_fn(d, 1, |s| {
            let a = s[0];
            let mut acc = Jet::constant(0.0);
            for c in 0..d {
                acc = acc - &jj[c * d + a] * &delta_f_jets.comps()[c];
            }
            acc
        });
        let lee_codifferential = lee2.value().pullback(fv);
        let delta_f = delta_f_jets.value().pullback(fv);
        let d_delta_f = delta_f_jets.exterior_derivative()?.value().pullback(fv);

        // Nijenhuis and ∇F
        let nij = transform_tensor(&lower_vector_valued(&nijenhuis(jj, d), &h, d), 3, d, fv);
        let nj = nabla_j(&gamma_jets, jj, d)?;
        let mut nf_coord = vec![0.0; d * d * d];
        for a in 0..d {
            for c in 0..d {
                for q in 0..d {
                    nf_coord[(a * d + c) * d + q] =
                        (0..d).map(|b| nj[(a * d + b) * d + c].value() * h[b * d + q]).sum();
                }
            }
        }
        let nabla_f = transform_tensor(&nf_coord, 3, d, fv);
        let decomposition = Decomposition::new(n, df.clone(), nij.clone(), lee_contraction.clone())?;
        let norms = decomposition.norms(&nabla_f, delta_lee);

        // connection family
        let (a0j, a1j) = connection_jets(&gamma_jets, &nj, jj, hj, &metric.hinv, d);
        let a0 = Coefficients::from_jets(&a0j, d);
        let a1 = Coefficients::from_jets(&a1j, d);
        let curvature_t = CurvatureFamily::new(&a0, &a1, &h, fv, n);
        let chern = a0.combine(&a1, 1.0);
        let torsion = transform_tensor(&lower_vector_valued(&chern.torsion(), &h, d), 3, d, fv);
        let minus_a1: Vec<f64> = a1.value.iter().map(|v| -v).collect();
        let gamma = transform_tensor(&lower_vector_valued(&minus_a1, &h, d), 3, d, fv);

        // volume and (∂, ∂̄) pieces
        let mut fact = 1.0;
        for k in 1..=n {
            fact *= k as f64;
        }
        let top = f_coord.value().power(n).comps()[0] / fact;
        let volume_ratio = top / sqrt_det;
        let l_df = df_coord.complex_derivation(jj);
        let ddbar_f = real_type_part(&l_df.exterior_derivative()?.value().pullback(fv), n, 0)?.scale(-0.5);
        let a = &decomposition.df_plus;
        let del_f_wedge_delbar_f = a.wedge(&a.complex_derivation(&jf)).scale(-0.5);

        Ok(Self {
            n,
            x: x.to_vec(),
            h,
            sqrt_det,
            frame,
            riemann,
            ricci: ric,
            s,
            ricci_j,
            s_j,
            rho_j,
            curvature_operator_f,
            weyl_f,
            f,
            nabla_f,
            nijenhuis: nij,
            decomposition,
            norms,
            lee_contraction,
            lee_coordinates,
            lee_codifferential,
            delta_f,
            d_delta_f,
            a0,
            a1,
            curvature_t,
            torsion,
            gamma,
            volume_ratio,
            ddbar_f,
            del_f_wedge_delbar_f,
            fields,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Largest entries of `D^t h` and `D^t J`.
    pub fn connection_residuals(&self, t: f64) -> (f64, f64) {
        compatibility_residuals(&self.a0.combine(&self.a1, t), &self.fields.h, &self.fields.j)
    }

    pub fn fields(&self) -> &Fields {
        &self.fields
    }

    /// A frame top-degree form as a multiple of `dv = F^n/n!`.
    pub fn top_density(&self, top: &KForm<f64>) -> Result<f64> {
        let d = self.dim();
        if top.degree() != d {
            return Err(GeomError::Domain(format!("density of a {}-form in dimension {d}", top.degree())));
        }
        let fact: f64 = (1..=self.n).map(|k| k as f64).product();
        Ok(top.comps()[0] / (self.f.power(self.n).comps()[0] / fact))
    }

    /// `√−1∂∂̄(F^k)` in the frame, differentiating `F^k` in coordinates.
    pub fn ddbar_power(&self, k: usize) -> Result<KForm<f64>> {
        let d = self.dim();
        let fk = fundamental_form(&self.fields.h, &self.fields.j, d).power(k);
        let l = fk.exterior_derivative()?.complex_derivation(&self.fields.j);
        let dl = l.exterior_derivative()?.value().pullback(&self.frame.vectors);
        Ok(real_type_part(&dl, self.n, 0)?.scale(-0.5))
    }

    /// `√−1∂∂̄(F^k)∧F^{n−k−1}` as a multiple of `dv`, for `1 ≤ k ≤ n−1`.
    pub fn kgauduchon_density(&self, k: usize) -> Result<f64> {
        let n = self.n;
        if k == 0 || k >= n {
            return Err(GeomError::Domain(format!("k = {k} outside 1..={}", n - 1)));
        }
        self.top_density(&self.ddbar_power(k)?.wedge(&self.f.power(n - k - 1)))
    }
}

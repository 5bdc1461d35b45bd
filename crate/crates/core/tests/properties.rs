use boxtherm::assembly::assemble_flux_matrix_full;
use boxtherm::verification::{fem_stiffness_oracle, jump_identity_residual, prolongate};
use boxtherm::{Coefficient, CoefficientModel, DualMesh, Mesh, NodalField};
use proptest::prelude::*;

fn rectangle(n: usize, sx: f64, sy: f64) -> Mesh {
    let base = Mesh::structured(n).unwrap();
    let vertices = base.vertices().iter().map(|p| [sx * p[0], sy * p[1]]).collect();
    Mesh::new(vertices, base.triangles().to_vec()).unwrap()
}

fn conductivity() -> CoefficientModel {
    CoefficientModel::new(Coefficient::Sigmoid { lo: 0.5, hi: 2.0 }, Coefficient::Const(1.0), 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn boxes_partition_any_rectangle(n in 1usize..10, sx in 0.3f64..3.0, sy in 0.3f64..3.0) {
        let mesh = rectangle(n, sx, sy);
        let dual = DualMesh::build(&mesh).unwrap();
        let total: f64 = dual.box_areas().iter().sum();
        prop_assert!((total - sx * sy).abs() <= 1e-12 * sx * sy);
        prop_assert!(dual.box_areas().iter().all(|&a| a > 0.0));
    }

    #[test]
    fn flux_matrix_is_symmetric_and_annihilates_constants(
        n in 1usize..8,
        sx in 0.5f64..2.0,
        state in proptest::collection::vec(-5.0f64..5.0, 81),
    ) {
        let mesh = rectangle(n, sx, 1.0);
        let dual = DualMesh::build(&mesh).unwrap();
        let u = NodalField::new(&mesh, state[..mesh.num_vertices()].to_vec()).unwrap();
        let a = assemble_flux_matrix_full(&mesh, &dual, &conductivity(), &u).unwrap();
        prop_assert!(a.symmetry_defect() <= 1e-14);
        for r in a.mul_vec(&vec![1.0; mesh.num_vertices()]) {
            prop_assert!(r.abs() <= 1e-12);
        }
    }

    #[test]
    fn unit_conductivity_is_the_fem_stiffness(n in 1usize..8, sx in 0.5f64..2.0, sy in 0.5f64..2.0) {
        let mesh = rectangle(n, sx, sy);
        let dual = DualMesh::build(&mesh).unwrap();
        let unit = CoefficientModel::new(Coefficient::Const(1.0), Coefficient::Const(1.0), 1.0).unwrap();
        let a = assemble_flux_matrix_full(&mesh, &dual, &unit, &NodalField::zeros(&mesh)).unwrap();
        let k = fem_stiffness_oracle(&mesh);
        for r in 0..mesh.num_vertices() {
            for c in 0..mesh.num_vertices() {
                prop_assert!((a.get(r, c) - k.get(r, c)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn jump_identity_for_random_fields(n in 1usize..8, values in proptest::collection::vec(-1.0f64..1.0, 81)) {
        let mesh = Mesh::structured(n).unwrap().refine_uniform();
        let dual = DualMesh::build(&mesh).unwrap();
        let mut v = NodalField::new(&mesh, (0..mesh.num_vertices()).map(|i| values[i % 81]).collect()).unwrap();
        v.zero_boundary(&mesh);
        prop_assert!(jump_identity_residual(&mesh, &dual, &v) <= 1e-12);
    }

    #[test]
    fn mesh_text_round_trip(n in 1usize..6, refinements in 0usize..2) {
        let mut mesh = Mesh::structured(n).unwrap();
        for _ in 0..refinements {
            mesh = mesh.refine_uniform();
        }
        let back = Mesh::from_text(&mesh.to_text()).unwrap();
        prop_assert_eq!(back.vertices(), mesh.vertices());
        prop_assert_eq!(back.triangles(), mesh.triangles());
        prop_assert_eq!(back.boundary_flags(), mesh.boundary_flags());
    }

    #[test]
    fn prolongation_preserves_nodal_values(n in 1usize..6, values in proptest::collection::vec(-1.0f64..1.0, 49)) {
        let mesh = Mesh::structured(n).unwrap();
        let f = NodalField::new(&mesh, values[..mesh.num_vertices()].to_vec()).unwrap();
        let (fine, g) = prolongate(&mesh, &f);
        prop_assert!(g.is_bound_to(&fine));
        prop_assert_eq!(&g.values()[..mesh.num_vertices()], f.values());
    }
}

//! Small examples worked by hand, checked through the public API only.

use opcat::code::ObjCode;
use opcat::compare::monotone_count_oracle;
use opcat::leinster::check_factorization;
use opcat::sequences::twisted_arrows;
use opcat::{Category, Leinster, MorCode, MorData};

fn fin_map(n: usize, m: usize, table: &[usize]) -> MorCode {
    MorCode {
        src: ObjCode::Fin(n),
        tgt: ObjCode::Fin(m),
        data: MorData::Table(table.to_vec()),
    }
}

#[test]
fn leinster_hom_sets_are_partial_maps() {
    // a partial map {1,2} -> {1} picks a domain subset and sends it to the single point
    let l = Leinster::new(Category::Fin).unwrap();
    assert_eq!(l.khom(&ObjCode::Fin(2), &ObjCode::Fin(1)).len(), 4);
    // partial maps {1,2} -> {1,2}: each point goes to one of two points or nowhere
    assert_eq!(l.khom(&ObjCode::Fin(2), &ObjCode::Fin(2)).len(), 9);
    // Λ(O)(⟨2⟩, ⟨1⟩): an interval of {1,2}, possibly empty in three positions
    let o = Leinster::new(Category::Ord).unwrap();
    assert_eq!(o.khom(&ObjCode::Ord(2), &ObjCode::Ord(1)).len(), 6);
}

#[test]
fn partial_map_factors_through_its_domain() {
    // 1 ↦ 1, 2 ↦ 1, 3 undefined: T{1,2} = {1,2,*} with * coded as 2
    let l = Leinster::new(Category::Fin).unwrap();
    let tgt = ObjCode::Fin(2);
    let phi = l.wrap(&tgt, fin_map(3, 3, &[0, 0, 2])).unwrap();
    let (fact, report) = check_factorization(&l, &phi, &Category::Fin.objects(3)).unwrap();
    assert!(report.passed(), "{report:?}");
    assert_eq!(fact.middle, ObjCode::Fin(2));
    assert!(l.is_inert(&fact.inert));
    assert!(l.is_active(&fact.active));
    assert_eq!(l.kcompose(&fact.active, &fact.inert).unwrap(), phi);
}

#[test]
fn monotone_counts_are_binomials() {
    // monotone maps n -> m number C(n+m-1, n)
    assert_eq!(monotone_count_oracle(2, 3), 6);
    assert_eq!(monotone_count_oracle(3, 2), 4);
    assert_eq!(monotone_count_oracle(0, 5), 1);
}

#[test]
fn twisted_arrows_of_one() {
    // intervals of [1]: (0,0), (0,1), (1,1)
    let t = twisted_arrows(1);
    assert_eq!(t.elements.len(), 3);
    let whole = t.index(&[0, 1]).unwrap();
    let left = t.index(&[0, 0]).unwrap();
    let right = t.index(&[1, 1]).unwrap();
    assert!(t.is_leq(left, whole) && t.is_leq(right, whole));
    assert!(!t.is_leq(left, right));
    assert!(t.marked.contains(&(left, whole)));
    assert!(!t.marked.contains(&(right, whole)));
}

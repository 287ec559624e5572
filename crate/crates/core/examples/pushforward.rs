//! Pullback and pushforward along `z ↦ z²`, and the companion system of a
//! scalar operator.

use stokes_resum::connection::{companion, pullback, pushforward, MeromorphicSystem, ScalarOperator};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = MeromorphicSystem::from_json_str(r#"{"rank":1,"pole_order":3,"ramification":1,"matrix":[[[[0,"2","0"],[1,"3","0"]]]]}"#)?;
    let down = pushforward(&sys, 2)?;
    println!("pushforward of d + (2 + 3z) z^-3 dz, pole order {}:", down.pole_order());
    println!("{}", down.to_json_string());

    let up = pullback(&sys, 2)?;
    println!("pullback, pole order {}: {}", up.pole_order(), up.to_json_string());

    let op = ScalarOperator::from_json_str(r#"{"pole_order":3,"coeffs":[[[1,"-1","0"]],[[2,"-1","0"]]]}"#)?;
    println!("companion of δ² − z²δ − z: {}", companion(&op)?.to_json_string());
    Ok(())
}

pub mod abelian;
pub mod actions;
pub mod coset_enum;
pub mod error;
pub mod group;
pub mod homology;
pub mod perm;
pub mod permgrp;
pub mod presentation;
pub mod tensor;
pub mod verify;

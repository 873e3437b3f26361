pub mod audit;
pub mod binomial;
pub mod enumerate;
pub mod gf2;
pub mod info;
pub mod optimize;
pub mod rates;

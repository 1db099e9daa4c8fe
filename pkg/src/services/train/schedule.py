from src.services.train.schemas import TrainConfig


def lr_factor(epoch: int, cfg: TrainConfig) -> float:
    if epoch < 0:
        raise ValueError(f"epoch must be non-negative, got {epoch}")
    return cfg.lr_gamma ** (epoch // cfg.lr_step_epochs)


def step_lr(epoch: int, cfg: TrainConfig) -> float:
    """base * gamma ** floor(epoch / step)"""
    return cfg.learning_rate * lr_factor(epoch, cfg)

from src.pcs import MockSystem


def test_vertical_cylinder_goes_down_first():
    system = MockSystem(total_time=3, cylinder_interval=1, controller_interval=1, mock_interval=1)
    states = system.execute_scenario()
    assert states[0].b_moving
    assert not states[0].a_moving


def test_horizontal_cylinder_eventually_moves():
    system = MockSystem(total_time=20, cylinder_interval=1, controller_interval=1, mock_interval=1)
    states = system.execute_scenario()
    assert any(s.a_moving for s in states)

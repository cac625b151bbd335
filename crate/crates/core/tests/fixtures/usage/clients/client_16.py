import shop.pricing as sp
from shop.cart import Cart, checkout, refund, merge_carts

sp.discount(100, 0.5)
sp.format_price(3, symbol='$', spaces=False)
sp.tax(7, region='UK', reduced=False)
sp.price(25, rounding=2)
c = Cart('cy', capacity=5, strict=True)
c.add('fig', qty=3)
c.total(with_tax=False)
c.remove('pear')
checkout(c, method='invoice', express=True)
refund(2, 'late')
